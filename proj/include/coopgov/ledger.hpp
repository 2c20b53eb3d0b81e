#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coopgov/game.hpp"
#include "coopgov/graph.hpp"

namespace coopgov {

/// Qualitative rendering of a cooperation ratio. Boundaries follow the
/// calibration tables: Rarely < 0.33, 0.33 <= Sometimes <= 0.66, Often > 0.66.
enum class CoopBucket : unsigned char { Rarely, Sometimes, Often };

std::string to_string(CoopBucket b);
CoopBucket bucket_from_string(const std::string& s);

/// Maps a ratio in [0,1] to its bucket; out-of-range values throw.
CoopBucket bucket_for(double ratio);

/// The four information-access levels the governor can grant.
enum class InfoTier : unsigned char { NoInfo, LA, LA_AR, LA_NR };

inline constexpr int kTierCount = 4;

std::string to_string(InfoTier t);
InfoTier tier_from_string(const std::string& s);

/// Full interaction history for one round. Tracks, per ordered (agent,
/// co-player) pair, the chronological action pairs from the first agent's
/// perspective, plus per-agent totals of actions taken and C actions.
/// Append-only within a round; cleared between rounds.
class HistoryStore {
public:
    explicit HistoryStore(int agent_count);

    int agent_count() const { return n_; }

    /// Appends pair_from_i to (i,j)'s history and the mirrored pair to
    /// (j,i)'s, updating both agents' counters. i == j throws.
    void record(AgentId i, AgentId j, const ActionPair& pair_from_i);

    const std::vector<ActionPair>& pair_history(AgentId i, AgentId j) const;

    std::optional<ActionPair> last_pair(AgentId i, AgentId j) const;

    std::int64_t action_count(AgentId a) const;
    std::int64_t coop_count(AgentId a) const;

    /// C actions / total actions across all co-players; absent if the
    /// agent has not acted yet.
    std::optional<double> coop_ratio(AgentId a) const;

    /// Pooled count-weighted ratio over the agent's graph neighbors
    /// (sum of their C counts over sum of their action counts), excluding
    /// the agent itself. Absent if no neighbor has acted.
    std::optional<double> neighborhood_ratio(const Graph& g, AgentId a) const;

    void clear();

private:
    std::size_t index(AgentId i, AgentId j) const;

    int n_;
    std::vector<std::vector<ActionPair>> pair_log_;  // n*n, row-major (i, j)
    std::vector<std::int64_t> actions_;
    std::vector<std::int64_t> coops_;
};

/// The per-decision information packet an agent sees. Which fields may be
/// present is dictated by the tier; absent optionals mean the underlying
/// data does not exist yet (e.g. no previous interaction).
struct InformationView {
    InfoTier tier = InfoTier::NoInfo;
    std::optional<ActionPair> last_pair;
    std::optional<CoopBucket> own_bucket;
    std::optional<CoopBucket> opponent_bucket;
    std::optional<CoopBucket> neighborhood_bucket;

    /// Throws std::invalid_argument if a field is present that the tier
    /// forbids (e.g. any bucket under LA, or anything under NoInfo).
    void validate_shape() const;
};

/// Assembles the view agent `a` gets about co-player `coplayer` under
/// `tier`, reading the store as-is. Snapshot semantics are the caller's
/// job: the simulation collects every decision of a step before recording
/// any of its outcomes, so all views within a step read end-of-previous-
/// step state. (a, coplayer) must be an edge of g.
InformationView build_view(const HistoryStore& store, const Graph& g, InfoTier tier, AgentId a,
                           AgentId coplayer);

}  // namespace coopgov
