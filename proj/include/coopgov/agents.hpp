#pragma once

#include "coopgov/calibration.hpp"
#include "coopgov/ledger.hpp"
#include "coopgov/rng.hpp"

namespace coopgov {

/// Decision contract for strategic agents. A decision may depend only on
/// the presented view and the caller-supplied random stream; policies keep
/// no per-agent state, so one immutable instance serves every agent.
class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;

    virtual Action decide(const InformationView& view, RngStream& rng) const = 0;

    /// Whether decide() may be called from several threads at once within
    /// a step (remote backends). Table policies stay sequential so the
    /// rng draw order is reproducible.
    virtual bool supports_parallel_decisions() const { return false; }
};

/// Stochastic agent that reproduces the measured cooperation frequencies:
/// it looks up P(C) for the view in the calibration table and samples.
class TableSla : public AgentPolicy {
public:
    explicit TableSla(CalibrationTable table) : table_(std::move(table)) {}

    /// P(C) for a view: first-move probability when there is no last pair,
    /// the LA table under LA, and the 36-cell grids under LA_NR / LA_AR
    /// with a fallback to the LA table when a bucket is still absent.
    /// Views whose fields do not fit their tier throw.
    double cooperation_probability(const InformationView& view) const;

    Action decide(const InformationView& view, RngStream& rng) const override {
        return rng.bernoulli(cooperation_probability(view)) ? Action::Cooperate : Action::Defect;
    }

    const CalibrationTable& table() const { return table_; }

private:
    CalibrationTable table_;
};

/// Free-function form of the table agent's decision rule.
inline Action table_sla_decide(const CalibrationTable& table, const InformationView& view,
                               RngStream& rng) {
    return TableSla(table).decide(view, rng);
}

}  // namespace coopgov
