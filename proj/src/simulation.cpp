#include "coopgov/simulation.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "coopgov/llm_client.hpp"
#include "coopgov/rng.hpp"

namespace coopgov {

std::string TierPolicySpec::describe() const {
    if (kind == Kind::Static) return "static:" + to_string(static_tier);
    return "rl:" + checkpoint;
}

void ScenarioConfig::validate() const {
    if (agents < 2) throw ConfigError("agents must be >= 2");
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
        throw ConfigError("edge_probability must be in [0,1]");
    if (steps_per_round < 1) throw ConfigError("steps_per_round must be >= 1");
    if (rounds < 1) throw ConfigError("rounds must be >= 1");
    if (agent_backend != "table" && agent_backend != "llm")
        throw ConfigError("agent_backend must be 'table' or 'llm'");
    if (tier_policy.kind == TierPolicySpec::Kind::Static &&
        tier_policy.static_tier == InfoTier::NoInfo)
        throw ConfigError("a static NoInfo tier policy is not allowed beyond step 0");
    if (tier_policy.kind == TierPolicySpec::Kind::Rl && tier_policy.checkpoint.empty())
        throw ConfigError("an RL tier policy needs a checkpoint path");
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ScenarioConfig cfg;
    cfg.agents = doc.value("agents", cfg.agents);
    cfg.edge_probability = doc.value("edge_probability", cfg.edge_probability);
    cfg.steps_per_round = doc.value("steps_per_round", cfg.steps_per_round);
    cfg.rounds = doc.value("rounds", cfg.rounds);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.agent_backend = doc.value("agent_backend", cfg.agent_backend);

    if (doc.contains("payoff")) {
        const auto& p = doc.at("payoff");
        try {
            cfg.payoff = PayoffMatrix(p.value("reward", 3), p.value("temptation", 5),
                                      p.value("punishment", 1), p.value("sucker", 0));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    if (doc.contains("tier_policy")) {
        const auto& tp = doc.at("tier_policy");
        const std::string type = tp.value("type", "static");
        if (type == "static") {
            cfg.tier_policy.kind = TierPolicySpec::Kind::Static;
            cfg.tier_policy.static_tier = tier_from_string(tp.value("tier", "LA"));
        } else if (type == "rl") {
            cfg.tier_policy.kind = TierPolicySpec::Kind::Rl;
            cfg.tier_policy.checkpoint = tp.value("checkpoint", "");
        } else {
            throw ConfigError("tier_policy.type must be 'static' or 'rl'");
        }
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string ScenarioConfig::to_json_text() const {
    nlohmann::json doc;
    doc["agents"] = agents;
    doc["edge_probability"] = edge_probability;
    doc["steps_per_round"] = steps_per_round;
    doc["rounds"] = rounds;
    doc["seed"] = seed;
    doc["agent_backend"] = agent_backend;
    doc["payoff"] = {{"reward", payoff.reward()},
                     {"temptation", payoff.temptation()},
                     {"punishment", payoff.punishment()},
                     {"sucker", payoff.sucker()}};
    if (tier_policy.kind == TierPolicySpec::Kind::Static)
        doc["tier_policy"] = {{"type", "static"}, {"tier", to_string(tier_policy.static_tier)}};
    else
        doc["tier_policy"] = {{"type", "rl"}, {"checkpoint", tier_policy.checkpoint}};
    return doc.dump(2);
}

std::uint64_t round_seed_for(std::uint64_t master_seed, int round_index) {
    return seed_chain(master_seed, kSeedTagRound, static_cast<std::uint64_t>(round_index));
}

RngStream decision_stream(std::uint64_t round_seed, AgentId agent, int step) {
    return RngStream(seed_chain(round_seed, kSeedTagDecision, static_cast<std::uint64_t>(agent),
                                static_cast<std::uint64_t>(step)));
}

StaticTierSelector::StaticTierSelector(InfoTier tier) : tier_(tier) {
    if (tier == InfoTier::NoInfo)
        throw ConfigError("a static NoInfo tier policy is not allowed beyond step 0");
}

std::vector<InfoTier> StaticTierSelector::select(const HistoryStore&, const Graph& g, int, int) {
    return std::vector<InfoTier>(static_cast<std::size_t>(g.agent_count()), tier_);
}

namespace {

void finalize_step_metrics(StepRecord& rec) {
    const std::size_t m = rec.interactions.size();
    if (m == 0) return;
    std::int64_t coop_actions = 0;
    std::int64_t welfare_sum = 0;
    std::array<std::int64_t, 3> pair_counts{};
    for (const auto& it : rec.interactions) {
        coop_actions += (it.action_i == Action::Cooperate) + (it.action_j == Action::Cooperate);
        welfare_sum += it.points_i + it.points_j;
        const bool ci = it.action_i == Action::Cooperate;
        const bool cj = it.action_j == Action::Cooperate;
        if (ci && cj)
            pair_counts[0] += 1;
        else if (!ci && !cj)
            pair_counts[2] += 1;
        else
            pair_counts[1] += 1;
    }
    rec.cooperation_rate = static_cast<double>(coop_actions) / static_cast<double>(2 * m);
    rec.normalized_welfare = static_cast<double>(welfare_sum) / static_cast<double>(m);
    for (std::size_t k = 0; k < 3; ++k)
        rec.pair_shares[k] = static_cast<double>(pair_counts[k]) / static_cast<double>(m);
}

struct PendingDecision {
    std::size_t edge_index;
    AgentId agent;
    AgentId coplayer;
    InformationView view;
};

}  // namespace

StepRecord run_step(SimState& state, const std::vector<InfoTier>& tiers,
                    const AgentPolicy& policy, int step) {
    const auto& edges = state.graph.edge_list();
    if (tiers.size() != static_cast<std::size_t>(state.graph.agent_count()))
        throw std::invalid_argument("run_step needs one tier per agent");

    StepRecord rec;
    rec.step = step;
    rec.tiers = tiers;
    rec.interactions.reserve(edges.size());

    // Phase 1: build every view against the end-of-previous-step store and
    // collect every decision before anything is recorded.
    std::vector<PendingDecision> pending;
    pending.reserve(edges.size() * 2);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        pending.push_back({e, edge.a, edge.b,
                           build_view(state.store, state.graph,
                                      tiers[static_cast<std::size_t>(edge.a)], edge.a, edge.b)});
        pending.push_back({e, edge.b, edge.a,
                           build_view(state.store, state.graph,
                                      tiers[static_cast<std::size_t>(edge.b)], edge.b, edge.a)});
    }

    std::vector<Action> decisions(pending.size());
    if (policy.supports_parallel_decisions() && pending.size() > 1) {
        // Results land at their job index, so canonical edge order is
        // restored no matter which worker finishes first. The policy's own
        // in-flight cap bounds the concurrent requests.
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            for (std::size_t k = next.fetch_add(1); k < pending.size(); k = next.fetch_add(1)) {
                try {
                    RngStream stream = decision_stream(state.round_seed, pending[k].agent, step);
                    decisions[k] = policy.decide(pending[k].view, stream);
                } catch (...) {
                    std::lock_guard<std::mutex> guard(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        const std::size_t worker_count = std::min<std::size_t>(pending.size(), 16);
        std::vector<std::thread> workers;
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(worker);
        for (auto& t : workers) t.join();
        if (failure) std::rethrow_exception(failure);
    } else {
        std::vector<RngStream> streams;
        streams.reserve(static_cast<std::size_t>(state.graph.agent_count()));
        for (AgentId a = 0; a < state.graph.agent_count(); ++a)
            streams.push_back(decision_stream(state.round_seed, a, step));
        for (std::size_t k = 0; k < pending.size(); ++k)
            decisions[k] =
                policy.decide(pending[k].view, streams[static_cast<std::size_t>(pending[k].agent)]);
    }

    // Phase 2: record outcomes in canonical edge order.
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& edge = edges[e];
        const Action ai = decisions[2 * e];
        const Action aj = decisions[2 * e + 1];
        const ActionPair pair_from_i{ai, aj};
        auto [pi, pj] = payoff(pair_from_i, state.payoff);
        state.store.record(edge.a, edge.b, pair_from_i);
        rec.interactions.push_back({edge.a, edge.b, ai, aj, pi, pj});
    }

    rec.coop_ratios.reserve(static_cast<std::size_t>(state.graph.agent_count()));
    for (AgentId a = 0; a < state.graph.agent_count(); ++a)
        rec.coop_ratios.push_back(state.store.coop_ratio(a));

    finalize_step_metrics(rec);
    return rec;
}

RoundLog run_round(const ScenarioConfig& cfg, int round_index, const AgentPolicy& policy,
                   TierSelector& selector) {
    cfg.validate();
    const std::uint64_t round_seed = round_seed_for(cfg.seed, round_index);

    RoundLog log;
    log.round_index = round_index;
    log.round_seed = round_seed;
    log.agents = cfg.agents;

    SimState state{generate_er(cfg.agents, cfg.edge_probability, round_seed),
                   HistoryStore(cfg.agents), round_seed, cfg.payoff};
    log.edges = state.graph.edge_list();

    try {
        for (int t = 0; t < cfg.steps_per_round; ++t) {
            std::vector<InfoTier> tiers;
            if (t == 0) {
                tiers.assign(static_cast<std::size_t>(cfg.agents), InfoTier::NoInfo);
            } else {
                tiers = selector.select(state.store, state.graph, t, cfg.steps_per_round);
                if (tiers.size() != static_cast<std::size_t>(cfg.agents))
                    throw std::logic_error("tier selector returned wrong arity");
                for (InfoTier tier : tiers)
                    if (tier == InfoTier::NoInfo)
                        throw std::logic_error("tier selector produced NoInfo after step 0");
            }
            log.steps.push_back(run_step(state, tiers, policy, t));
        }
    } catch (const DecisionError& e) {
        log.valid = false;
        log.error = e.what();
        return log;
    }

    std::vector<StepRecord> unused;
    log.metrics = RoundLog::recompute_metrics(log, unused);
    return log;
}

RoundMetrics RoundLog::recompute_metrics(const RoundLog& log, std::vector<StepRecord>& steps_out) {
    steps_out = log.steps;
    for (auto& rec : steps_out) finalize_step_metrics(rec);

    RoundMetrics metrics;
    if (steps_out.empty()) return metrics;
    double coop_sum = 0.0;
    double sw_sum = 0.0;
    for (const auto& rec : steps_out) {
        coop_sum += rec.cooperation_rate;
        sw_sum += rec.normalized_welfare;
    }
    metrics.avg_cooperation = coop_sum / static_cast<double>(steps_out.size());
    metrics.avg_welfare = sw_sum / static_cast<double>(steps_out.size());
    metrics.final_cooperation = steps_out.back().cooperation_rate;
    metrics.final_welfare = steps_out.back().normalized_welfare;
    return metrics;
}

namespace {

nlohmann::json step_to_json(const StepRecord& rec) {
    nlohmann::json j;
    j["step"] = rec.step;
    auto tiers = nlohmann::json::array();
    for (InfoTier t : rec.tiers) tiers.push_back(to_string(t));
    j["tiers"] = std::move(tiers);
    auto interactions = nlohmann::json::array();
    for (const auto& it : rec.interactions)
        interactions.push_back({{"i", it.i},
                                {"j", it.j},
                                {"ai", to_string(it.action_i)},
                                {"aj", to_string(it.action_j)},
                                {"pi", it.points_i},
                                {"pj", it.points_j}});
    j["interactions"] = std::move(interactions);
    auto ratios = nlohmann::json::array();
    auto buckets = nlohmann::json::array();
    for (const auto& ratio : rec.coop_ratios) {
        if (ratio) {
            ratios.push_back(*ratio);
            buckets.push_back(to_string(bucket_for(*ratio)));
        } else {
            ratios.push_back(nullptr);
            buckets.push_back(nullptr);
        }
    }
    j["coop_ratios"] = std::move(ratios);
    j["coop_buckets"] = std::move(buckets);
    j["cooperation_rate"] = rec.cooperation_rate;
    j["normalized_welfare"] = rec.normalized_welfare;
    j["pair_shares"] = rec.pair_shares;
    return j;
}

StepRecord step_from_json(const nlohmann::json& j) {
    StepRecord rec;
    rec.step = j.at("step").get<int>();
    for (const auto& t : j.at("tiers")) rec.tiers.push_back(tier_from_string(t.get<std::string>()));
    for (const auto& it : j.at("interactions")) {
        InteractionRecord r;
        r.i = it.at("i").get<int>();
        r.j = it.at("j").get<int>();
        r.action_i = action_from_char(it.at("ai").get<std::string>().at(0));
        r.action_j = action_from_char(it.at("aj").get<std::string>().at(0));
        r.points_i = it.at("pi").get<int>();
        r.points_j = it.at("pj").get<int>();
        rec.interactions.push_back(r);
    }
    if (j.contains("coop_ratios"))
        for (const auto& ratio : j.at("coop_ratios")) {
            if (ratio.is_null())
                rec.coop_ratios.push_back(std::nullopt);
            else
                rec.coop_ratios.push_back(ratio.get<double>());
        }
    rec.cooperation_rate = j.at("cooperation_rate").get<double>();
    rec.normalized_welfare = j.at("normalized_welfare").get<double>();
    rec.pair_shares = j.at("pair_shares").get<std::array<double, 3>>();
    return rec;
}

}  // namespace

std::string RoundLog::to_json_text() const {
    nlohmann::json doc;
    doc["round_index"] = round_index;
    doc["round_seed"] = round_seed;
    doc["agents"] = agents;
    auto edges_json = nlohmann::json::array();
    for (const auto& e : edges) edges_json.push_back({e.a, e.b});
    doc["edges"] = std::move(edges_json);
    auto steps_json = nlohmann::json::array();
    for (const auto& s : steps) steps_json.push_back(step_to_json(s));
    doc["steps"] = std::move(steps_json);
    doc["metrics"] = {{"avg_cooperation", metrics.avg_cooperation},
                      {"final_cooperation", metrics.final_cooperation},
                      {"avg_welfare", metrics.avg_welfare},
                      {"final_welfare", metrics.final_welfare}};
    doc["valid"] = valid;
    doc["error"] = error;
    return doc.dump(2);
}

RoundLog RoundLog::from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    RoundLog log;
    log.round_index = doc.at("round_index").get<int>();
    log.round_seed = doc.at("round_seed").get<std::uint64_t>();
    log.agents = doc.at("agents").get<int>();
    for (const auto& e : doc.at("edges")) log.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    for (const auto& s : doc.at("steps")) log.steps.push_back(step_from_json(s));
    const auto& m = doc.at("metrics");
    log.metrics.avg_cooperation = m.at("avg_cooperation").get<double>();
    log.metrics.final_cooperation = m.at("final_cooperation").get<double>();
    log.metrics.avg_welfare = m.at("avg_welfare").get<double>();
    log.metrics.final_welfare = m.at("final_welfare").get<double>();
    log.valid = doc.at("valid").get<bool>();
    log.error = doc.at("error").get<std::string>();
    return log;
}

ExperimentResult run_experiment(const ScenarioConfig& cfg, const AgentPolicy& policy,
                                TierSelector& selector) {
    cfg.validate();
    ExperimentResult result;
    result.rounds.reserve(static_cast<std::size_t>(cfg.rounds));
    for (int r = 0; r < cfg.rounds; ++r)
        result.rounds.push_back(run_round(cfg, r, policy, selector));
    result.summary = summarize(result.rounds);
    return result;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return out;
}

}  // namespace

ExperimentSummary summarize(const std::vector<RoundLog>& rounds) {
    ExperimentSummary summary;
    std::vector<double> avg_coop, final_coop, avg_sw, final_sw;
    for (const auto& log : rounds) {
        if (!log.valid) {
            summary.invalid_rounds += 1;
            continue;
        }
        summary.valid_rounds += 1;
        avg_coop.push_back(log.metrics.avg_cooperation);
        final_coop.push_back(log.metrics.final_cooperation);
        avg_sw.push_back(log.metrics.avg_welfare);
        final_sw.push_back(log.metrics.final_welfare);
    }
    const auto ac = mean_std(avg_coop);
    summary.avg_coop_mean = ac.mean;
    summary.avg_coop_std = ac.std;
    const auto fc = mean_std(final_coop);
    summary.final_coop_mean = fc.mean;
    summary.final_coop_std = fc.std;
    const auto asw = mean_std(avg_sw);
    summary.avg_sw_mean = asw.mean;
    summary.avg_sw_std = asw.std;
    const auto fsw = mean_std(final_sw);
    summary.final_sw_mean = fsw.mean;
    summary.final_sw_std = fsw.std;
    return summary;
}

}  // namespace coopgov
