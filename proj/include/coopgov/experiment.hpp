#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coopgov/agents.hpp"
#include "coopgov/governor.hpp"
#include "coopgov/simulation.hpp"

namespace coopgov {

/// A fixed information view presented repeatedly to measure an agent's
/// cooperation frequency under controlled conditions.
struct MicrovalScenario {
    std::string label;
    InformationView view;
    int trials = 100;
};

struct MicrovalResult {
    double frequency = 0.0;
    double ci_low = 0.0;   // 95% binomial (normal approximation)
    double ci_high = 0.0;
    int trials = 0;
    int errors = 0;  // backend failures, counted apart from decisions
};

/// Evaluates the identical view `trials` times with independent draws from
/// a stream derived from `seed`.
MicrovalResult microval(const MicrovalScenario& scenario, const AgentPolicy& backend,
                        std::uint64_t seed);

/// A scenario per checked calibration cell, with its expected probability:
/// the first-move cell, all 4 LA cells and all 36 NR cells.
struct CalibrationCell {
    MicrovalScenario scenario;
    double expected = 0.0;
};
std::vector<CalibrationCell> calibration_grid(const CalibrationTable& table, int trials);

void write_microval_csv(const std::string& path, const std::vector<CalibrationCell>& cells,
                        const std::vector<MicrovalResult>& results);

struct SweepRow {
    std::string name;
    ExperimentSummary summary;
    std::vector<RoundLog> rounds;
};

/// Runs the three static baselines — and the RL governor when a network is
/// supplied — on identical seed sets: round k of every scenario shares its
/// graph and decision streams, so metric differences stem only from tiers.
std::vector<SweepRow> sweep_baselines(const ScenarioConfig& cfg, const AgentPolicy& agents,
                                      const PolicyNetwork* governor);

void write_summary_csv(const std::string& path, const std::vector<SweepRow>& rows);

/// Per-step across-round mean and sample standard deviation for the
/// reported series. Pair shares are [CC, CD+DC, DD] and sum to 1 each step.
struct ReportSeries {
    std::vector<double> coop_mean, coop_std;
    std::vector<double> welfare_mean, welfare_std;
    std::vector<std::array<double, 3>> pair_mean, pair_std;
};

ReportSeries build_series(const std::vector<RoundLog>& rounds);

/// Writes series_*.csv and charts/*.svg (mean lines with std bands) for a
/// set of round logs. Throws if no valid round is present.
void emit_report(const std::vector<RoundLog>& rounds, const std::string& out_dir);

}  // namespace coopgov
