#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coopgov/agents.hpp"
#include "coopgov/game.hpp"
#include "coopgov/graph.hpp"
#include "coopgov/ledger.hpp"

namespace coopgov {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// How the governor side of a scenario picks tiers after the forced
/// all-NoInfo first step.
struct TierPolicySpec {
    enum class Kind { Static, Rl };
    Kind kind = Kind::Static;
    InfoTier static_tier = InfoTier::LA;
    std::string checkpoint;  // for Kind::Rl

    std::string describe() const;
};

struct ScenarioConfig {
    int agents = 20;
    double edge_probability = 0.25;
    int steps_per_round = 20;
    int rounds = 10;
    PayoffMatrix payoff;
    std::string agent_backend = "table";  // "table" | "llm"
    TierPolicySpec tier_policy;
    std::uint64_t seed = 0;

    /// Enforces T >= 1, rounds >= 1, known backend, and rejects a static
    /// NoInfo policy (NoInfo is only ever the forced step-0 tier).
    void validate() const;

    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);
    std::string to_json_text() const;
};

/// Round seeds derive from the master seed and round index so rounds can
/// be replayed or run in parallel independently.
std::uint64_t round_seed_for(std::uint64_t master_seed, int round_index);

/// The per-agent decision stream for one step of one round.
RngStream decision_stream(std::uint64_t round_seed, AgentId agent, int step);

/// Supplies one tier per agent for steps t >= 1. Step 0 never consults a
/// selector: the round loop forces all-NoInfo there.
class TierSelector {
public:
    virtual ~TierSelector() = default;
    virtual std::vector<InfoTier> select(const HistoryStore& store, const Graph& g, int step,
                                         int horizon) = 0;
};

/// Same non-NoInfo tier for everyone, every step.
class StaticTierSelector : public TierSelector {
public:
    explicit StaticTierSelector(InfoTier tier);
    std::vector<InfoTier> select(const HistoryStore&, const Graph& g, int, int) override;

private:
    InfoTier tier_;
};

struct InteractionRecord {
    AgentId i;
    AgentId j;
    Action action_i;
    Action action_j;
    int points_i;
    int points_j;
};

/// Everything that happened in one step plus the derived metrics (which
/// stay recomputable from the raw interaction records) and each agent's
/// end-of-step cooperation ratio with its bucket, for post-hoc analysis.
struct StepRecord {
    int step = 0;
    std::vector<InfoTier> tiers;
    std::vector<InteractionRecord> interactions;
    std::vector<std::optional<double>> coop_ratios;  // per agent, end of step
    double cooperation_rate = 0.0;
    double normalized_welfare = 0.0;
    std::array<double, 3> pair_shares{};  // [CC, CD+DC, DD]
};

struct RoundMetrics {
    double avg_cooperation = 0.0;
    double final_cooperation = 0.0;
    double avg_welfare = 0.0;
    double final_welfare = 0.0;
};

struct RoundLog {
    int round_index = 0;
    std::uint64_t round_seed = 0;
    int agents = 0;
    std::vector<Edge> edges;
    std::vector<StepRecord> steps;
    RoundMetrics metrics;
    bool valid = true;
    std::string error;

    std::string to_json_text() const;
    static RoundLog from_json_text(const std::string& text);

    /// Recomputes the per-step metrics and round metrics from the raw
    /// interaction records (ignoring the stored values).
    static RoundMetrics recompute_metrics(const RoundLog& log, std::vector<StepRecord>& steps_out);
};

/// Mutable state of a round in progress.
struct SimState {
    Graph graph;
    HistoryStore store;
    std::uint64_t round_seed;
    PayoffMatrix payoff;
};

/// Plays every edge once: builds both endpoints' views from the current
/// store (end-of-previous-step state), collects all decisions, then
/// records outcomes — the two-phase split is what makes views snapshots.
/// Agents decide once per incident edge, drawing from their per-(agent,
/// step) stream in canonical edge order.
StepRecord run_step(SimState& state, const std::vector<InfoTier>& tiers,
                    const AgentPolicy& policy, int step);

/// One full round: fresh graph from the derived round seed, forced
/// all-NoInfo step 0, selector-driven tiers afterwards. Decision errors
/// from the agent backend mark the round invalid instead of propagating.
RoundLog run_round(const ScenarioConfig& cfg, int round_index, const AgentPolicy& policy,
                   TierSelector& selector);

struct ExperimentSummary {
    double avg_coop_mean = 0.0, avg_coop_std = 0.0;
    double final_coop_mean = 0.0, final_coop_std = 0.0;
    double avg_sw_mean = 0.0, avg_sw_std = 0.0;
    double final_sw_mean = 0.0, final_sw_std = 0.0;
    int valid_rounds = 0;
    int invalid_rounds = 0;
};

struct ExperimentResult {
    std::vector<RoundLog> rounds;
    ExperimentSummary summary;
};

/// cfg.rounds rounds with aggregate means and sample standard deviations
/// of the four headline metrics; invalid rounds are excluded from the
/// aggregates but kept in the log list.
ExperimentResult run_experiment(const ScenarioConfig& cfg, const AgentPolicy& policy,
                                TierSelector& selector);

ExperimentSummary summarize(const std::vector<RoundLog>& rounds);

}  // namespace coopgov
