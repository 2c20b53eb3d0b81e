#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coopgov/policy_network.hpp"
#include "coopgov/simulation.hpp"

namespace coopgov {

class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

/// What the governor sees about one agent before assigning a tier: the
/// agent's own cooperation ratio, its pooled neighborhood ratio (0 while
/// absent), the fraction of its previous-step interactions that were
/// mutual cooperation, and normalized time.
struct Observation {
    double own_ratio = 0.0;
    double neighborhood_ratio = 0.0;
    double mutual_coop_frac = 0.0;
    double time_frac = 0.0;

    std::array<double, kObservationDim> as_array() const {
        return {own_ratio, neighborhood_ratio, mutual_coop_frac, time_frac};
    }
};

Observation build_observation(const HistoryStore& store, const Graph& g, AgentId agent, int step,
                              int horizon);

enum class SelectMode { Sample, Greedy };

/// One tier per agent. Step 0 is forced all-NoInfo without consulting the
/// network or drawing randomness; later steps sample from (or argmax over)
/// the shared actor's softmax per agent.
std::vector<InfoTier> select_tiers(const PolicyNetwork& net,
                                   const std::vector<Observation>& observations, int step,
                                   SelectMode mode, RngStream& rng);

/// Mean interaction welfare of a completed step (Table 3 normalization).
/// A step with zero interactions has no defined reward and throws.
double step_reward(const StepRecord& rec, const PayoffMatrix& matrix);

struct TrainingConfig {
    double lr_actor = 0.001;
    double lr_critic = 0.005;
    double discount = 0.99;
    double entropy_coeff = 0.01;
    int episodes = 200;
    int hidden = 256;
    std::vector<std::uint64_t> eval_seeds;

    void validate() const;

    /// FNV-1a over the canonical JSON of the fields that shape the
    /// network and update rule; stored in checkpoints.
    std::string config_hash() const;
};

/// One (agent, step) experience. The reward is the global step reward,
/// assigned identically to every agent's transition.
struct Transition {
    Observation obs;
    int action_index = 0;  // actor index, see tier_from_action_index
    double reward = 0.0;
    Observation next_obs;
    bool terminal = false;
};

struct TdDiagnostics {
    double critic_loss = 0.0;      // mean squared TD error
    double actor_loss = 0.0;       // minimized surrogate (-objective)
    double mean_entropy = 0.0;
    double mean_advantage = 0.0;
};

/// One batched TD(0) actor-critic update: for each transition the critic
/// target is r + discount * V(next) * (1 - terminal); the critic descends
/// the squared TD error at lr_critic and the actor ascends
/// advantage * log pi(a|obs) + entropy_coeff * H(pi) at lr_actor, with the
/// advantage treated as a constant. Gradients are averaged over the batch
/// and applied once. Non-finite losses or gradients throw TrainingError.
TdDiagnostics td_update(PolicyNetwork& net, std::span<const Transition> batch,
                        const TrainingConfig& cfg);

struct EpisodePoint {
    int episode = 0;
    double discounted_return = 0.0;
    double mean_cooperation = 0.0;
};

struct TrainResult {
    PolicyNetwork net;
    std::vector<EpisodePoint> curve;
};

/// Trains the governor for cfg.episodes rounds of the scenario, each on a
/// fresh graph derived from (seed, episode). Tiers are sampled during
/// training; td_update runs once per step over all agents' transitions.
/// Step 0 is forced NoInfo and contributes no transitions (the actor has
/// no NoInfo head and the step-0 reward is policy-independent), but it
/// does count toward the episode's discounted return. Deterministic for a
/// fixed seed.
TrainResult train(const ScenarioConfig& scenario, const TrainingConfig& cfg, std::uint64_t seed,
                  const AgentPolicy& agents);

void write_learning_curve_csv(const std::string& path, const std::vector<EpisodePoint>& curve);

/// Greedy tier selection backed by a trained network; plugs into
/// run_round / run_experiment for evaluation.
class GovernorTierSelector : public TierSelector {
public:
    explicit GovernorTierSelector(const PolicyNetwork& net) : net_(&net) {}

    std::vector<InfoTier> select(const HistoryStore& store, const Graph& g, int step,
                                 int horizon) override;

private:
    const PolicyNetwork* net_;
};

}  // namespace coopgov
