#include "coopgov/ledger.hpp"

#include <stdexcept>

namespace coopgov {

std::string to_string(CoopBucket b) {
    switch (b) {
        case CoopBucket::Rarely: return "Rarely";
        case CoopBucket::Sometimes: return "Sometimes";
        case CoopBucket::Often: return "Often";
    }
    throw std::logic_error("bad CoopBucket");
}

CoopBucket bucket_from_string(const std::string& s) {
    if (s == "Rarely") return CoopBucket::Rarely;
    if (s == "Sometimes") return CoopBucket::Sometimes;
    if (s == "Often") return CoopBucket::Often;
    throw std::invalid_argument("unknown bucket '" + s + "'");
}

CoopBucket bucket_for(double ratio) {
    if (!(ratio >= 0.0 && ratio <= 1.0))
        throw std::invalid_argument("ratio " + std::to_string(ratio) + " outside [0,1]");
    if (ratio < 0.33) return CoopBucket::Rarely;
    if (ratio <= 0.66) return CoopBucket::Sometimes;
    return CoopBucket::Often;
}

std::string to_string(InfoTier t) {
    switch (t) {
        case InfoTier::NoInfo: return "NoInfo";
        case InfoTier::LA: return "LA";
        case InfoTier::LA_AR: return "LA_AR";
        case InfoTier::LA_NR: return "LA_NR";
    }
    throw std::logic_error("bad InfoTier");
}

InfoTier tier_from_string(const std::string& s) {
    if (s == "NoInfo") return InfoTier::NoInfo;
    if (s == "LA") return InfoTier::LA;
    if (s == "LA_AR") return InfoTier::LA_AR;
    if (s == "LA_NR") return InfoTier::LA_NR;
    throw std::invalid_argument("unknown tier '" + s + "'");
}

HistoryStore::HistoryStore(int agent_count) : n_(agent_count) {
    if (n_ < 1) throw std::invalid_argument("HistoryStore needs at least one agent");
    pair_log_.resize(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_));
    actions_.assign(static_cast<std::size_t>(n_), 0);
    coops_.assign(static_cast<std::size_t>(n_), 0);
}

std::size_t HistoryStore::index(AgentId i, AgentId j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw std::out_of_range("agent id out of range: (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
}

void HistoryStore::record(AgentId i, AgentId j, const ActionPair& pair_from_i) {
    if (i == j) throw std::invalid_argument("agent cannot interact with itself");
    pair_log_[index(i, j)].push_back(pair_from_i);
    pair_log_[index(j, i)].push_back(pair_from_i.swapped());
    actions_[static_cast<std::size_t>(i)] += 1;
    actions_[static_cast<std::size_t>(j)] += 1;
    if (pair_from_i.own == Action::Cooperate) coops_[static_cast<std::size_t>(i)] += 1;
    if (pair_from_i.other == Action::Cooperate) coops_[static_cast<std::size_t>(j)] += 1;
}

const std::vector<ActionPair>& HistoryStore::pair_history(AgentId i, AgentId j) const {
    return pair_log_[index(i, j)];
}

std::optional<ActionPair> HistoryStore::last_pair(AgentId i, AgentId j) const {
    const auto& log = pair_log_[index(i, j)];
    if (log.empty()) return std::nullopt;
    return log.back();
}

std::int64_t HistoryStore::action_count(AgentId a) const {
    return actions_.at(static_cast<std::size_t>(a));
}

std::int64_t HistoryStore::coop_count(AgentId a) const {
    return coops_.at(static_cast<std::size_t>(a));
}

std::optional<double> HistoryStore::coop_ratio(AgentId a) const {
    const auto acts = actions_.at(static_cast<std::size_t>(a));
    if (acts == 0) return std::nullopt;
    return static_cast<double>(coops_[static_cast<std::size_t>(a)]) / static_cast<double>(acts);
}

std::optional<double> HistoryStore::neighborhood_ratio(const Graph& g, AgentId a) const {
    std::int64_t pooled_actions = 0;
    std::int64_t pooled_coops = 0;
    for (AgentId nbr : g.neighbors(a)) {
        pooled_actions += actions_[static_cast<std::size_t>(nbr)];
        pooled_coops += coops_[static_cast<std::size_t>(nbr)];
    }
    if (pooled_actions == 0) return std::nullopt;
    return static_cast<double>(pooled_coops) / static_cast<double>(pooled_actions);
}

void HistoryStore::clear() {
    for (auto& log : pair_log_) log.clear();
    actions_.assign(actions_.size(), 0);
    coops_.assign(coops_.size(), 0);
}

void InformationView::validate_shape() const {
    auto forbid = [&](bool present, const char* field) {
        if (present)
            throw std::invalid_argument("view with tier " + to_string(tier) +
                                        " must not carry " + field);
    };
    switch (tier) {
        case InfoTier::NoInfo:
            forbid(last_pair.has_value(), "last_pair");
            forbid(own_bucket.has_value(), "own_bucket");
            forbid(opponent_bucket.has_value(), "opponent_bucket");
            forbid(neighborhood_bucket.has_value(), "neighborhood_bucket");
            break;
        case InfoTier::LA:
            forbid(own_bucket.has_value(), "own_bucket");
            forbid(opponent_bucket.has_value(), "opponent_bucket");
            forbid(neighborhood_bucket.has_value(), "neighborhood_bucket");
            break;
        case InfoTier::LA_AR:
            forbid(neighborhood_bucket.has_value(), "neighborhood_bucket");
            break;
        case InfoTier::LA_NR:
            forbid(opponent_bucket.has_value(), "opponent_bucket");
            break;
    }
}

InformationView build_view(const HistoryStore& store, const Graph& g, InfoTier tier, AgentId a,
                           AgentId coplayer) {
    if (!g.has_edge(a, coplayer))
        throw std::invalid_argument("(" + std::to_string(a) + "," + std::to_string(coplayer) +
                                    ") is not an edge");
    InformationView view;
    view.tier = tier;
    if (tier == InfoTier::NoInfo) return view;

    view.last_pair = store.last_pair(a, coplayer);
    if (tier == InfoTier::LA) return view;

    if (auto own = store.coop_ratio(a)) view.own_bucket = bucket_for(*own);
    if (tier == InfoTier::LA_AR) {
        if (auto opp = store.coop_ratio(coplayer)) view.opponent_bucket = bucket_for(*opp);
    } else {
        if (auto nbhd = store.neighborhood_ratio(g, a))
            view.neighborhood_bucket = bucket_for(*nbhd);
    }
    return view;
}

}  // namespace coopgov
