#include "coopgov/governor.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace coopgov {

Observation build_observation(const HistoryStore& store, const Graph& g, AgentId agent, int step,
                              int horizon) {
    if (step > horizon) throw std::invalid_argument("observation step beyond horizon");
    Observation obs;
    obs.own_ratio = store.coop_ratio(agent).value_or(0.0);
    obs.neighborhood_ratio = store.neighborhood_ratio(g, agent).value_or(0.0);

    // Every edge plays every step, so each neighbor's latest pair is the
    // previous step's interaction.
    if (step > 0) {
        int mutual = 0;
        int counted = 0;
        for (AgentId nbr : g.neighbors(agent)) {
            const auto last = store.last_pair(agent, nbr);
            if (!last) continue;
            ++counted;
            if (last->own == Action::Cooperate && last->other == Action::Cooperate) ++mutual;
        }
        if (counted > 0)
            obs.mutual_coop_frac = static_cast<double>(mutual) / static_cast<double>(counted);
    }
    obs.time_frac = static_cast<double>(step) / static_cast<double>(horizon);
    return obs;
}

std::vector<InfoTier> select_tiers(const PolicyNetwork& net,
                                   const std::vector<Observation>& observations, int step,
                                   SelectMode mode, RngStream& rng) {
    std::vector<InfoTier> tiers;
    if (step == 0) {
        tiers.assign(observations.size(), InfoTier::NoInfo);
        return tiers;
    }
    tiers.reserve(observations.size());
    for (const auto& obs : observations) {
        const auto input = obs.as_array();
        const auto probs = net.action_probabilities(input);
        int choice = 0;
        if (mode == SelectMode::Greedy) {
            for (int k = 1; k < kTierActionCount; ++k)
                if (probs[static_cast<std::size_t>(k)] > probs[static_cast<std::size_t>(choice)])
                    choice = k;
        } else {
            const double u = rng.uniform01();
            double cumulative = 0.0;
            choice = kTierActionCount - 1;  // rounding residue falls through
            for (int k = 0; k < kTierActionCount; ++k) {
                cumulative += probs[static_cast<std::size_t>(k)];
                if (u < cumulative) {
                    choice = k;
                    break;
                }
            }
        }
        tiers.push_back(tier_from_action_index(choice));
    }
    return tiers;
}

double step_reward(const StepRecord& rec, const PayoffMatrix& matrix) {
    if (rec.interactions.empty())
        throw std::invalid_argument("step reward undefined without interactions");
    std::int64_t welfare = 0;
    for (const auto& it : rec.interactions)
        welfare += interaction_welfare({it.action_i, it.action_j}, matrix);
    return static_cast<double>(welfare) / static_cast<double>(rec.interactions.size());
}

void TrainingConfig::validate() const {
    if (!(lr_actor > 0.0) || !(lr_critic > 0.0))
        throw TrainingError("learning rates must be positive");
    if (!(discount >= 0.0 && discount <= 1.0)) throw TrainingError("discount must be in [0,1]");
    if (entropy_coeff < 0.0) throw TrainingError("entropy_coeff must be >= 0");
    if (episodes < 0) throw TrainingError("episodes must be >= 0");
    if (hidden < 1) throw TrainingError("hidden must be >= 1");
}

std::string TrainingConfig::config_hash() const {
    nlohmann::json doc;
    doc["lr_actor"] = lr_actor;
    doc["lr_critic"] = lr_critic;
    doc["discount"] = discount;
    doc["entropy_coeff"] = entropy_coeff;
    doc["hidden"] = hidden;
    doc["observation_dim"] = kObservationDim;
    doc["actions"] = kTierActionCount;
    const std::string text = doc.dump();
    std::uint64_t hash = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

TdDiagnostics td_update(PolicyNetwork& net, std::span<const Transition> batch,
                        const TrainingConfig& cfg) {
    cfg.validate();
    if (batch.empty()) throw TrainingError("td_update needs a nonempty batch");

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    std::vector<double> critic_grad(net.critic().param_count(), 0.0);
    std::vector<double> actor_grad(net.actor().param_count(), 0.0);
    TdDiagnostics diag;

    for (const Transition& tr : batch) {
        const auto obs = tr.obs.as_array();

        const auto critic_acts = net.critic().forward(obs);
        const double value = critic_acts.output[0];
        double bootstrap = 0.0;
        if (!tr.terminal) {
            const auto next_obs = tr.next_obs.as_array();
            bootstrap = net.critic().forward(next_obs).output[0];
        }
        const double target = tr.reward + cfg.discount * bootstrap;
        const double advantage = target - value;  // TD error, constant for the actor

        // Critic: descend mean (V - target)^2, target held fixed.
        const double critic_out_grad = 2.0 * (value - target) * inv_batch;
        net.critic().backward(obs, critic_acts, std::span<const double>(&critic_out_grad, 1),
                              critic_grad);

        // Actor: descend -(advantage * log pi(a) + entropy_coeff * H).
        const auto actor_acts = net.actor().forward(obs);
        const auto probs = softmax(actor_acts.output);
        if (tr.action_index < 0 || tr.action_index >= kTierActionCount)
            throw TrainingError("transition action index out of range");

        double entropy = 0.0;
        for (double p : probs) entropy -= p * std::log(p);

        std::array<double, kTierActionCount> logit_grad{};
        for (int k = 0; k < kTierActionCount; ++k) {
            const double p = probs[static_cast<std::size_t>(k)];
            const double indicator = (k == tr.action_index) ? 1.0 : 0.0;
            const double dlogp = indicator - p;               // d log pi(a) / d z_k
            const double dentropy = -p * (std::log(p) + entropy);  // d H / d z_k
            logit_grad[static_cast<std::size_t>(k)] =
                -(advantage * dlogp + cfg.entropy_coeff * dentropy) * inv_batch;
        }
        net.actor().backward(obs, actor_acts, logit_grad, actor_grad);

        diag.critic_loss += advantage * advantage * inv_batch;
        diag.actor_loss -=
            (advantage * std::log(probs[static_cast<std::size_t>(tr.action_index)]) +
             cfg.entropy_coeff * entropy) *
            inv_batch;
        diag.mean_entropy += entropy * inv_batch;
        diag.mean_advantage += advantage * inv_batch;
    }

    if (!std::isfinite(diag.critic_loss) || !std::isfinite(diag.actor_loss))
        throw TrainingError("non-finite loss in td_update (critic " +
                            std::to_string(diag.critic_loss) + ", actor " +
                            std::to_string(diag.actor_loss) + ")");
    for (double g : critic_grad)
        if (!std::isfinite(g)) throw TrainingError("non-finite critic gradient");
    for (double g : actor_grad)
        if (!std::isfinite(g)) throw TrainingError("non-finite actor gradient");

    net.critic().apply_gradient(critic_grad, cfg.lr_critic);
    net.actor().apply_gradient(actor_grad, cfg.lr_actor);
    return diag;
}

TrainResult train(const ScenarioConfig& scenario, const TrainingConfig& cfg, std::uint64_t seed,
                  const AgentPolicy& agents) {
    scenario.validate();
    cfg.validate();

    TrainResult result{PolicyNetwork(cfg.hidden, seed_chain(seed, kSeedTagInit)), {}};
    result.curve.reserve(static_cast<std::size_t>(cfg.episodes));

    const int horizon = scenario.steps_per_round;
    for (int episode = 0; episode < cfg.episodes; ++episode) {
        try {
            const std::uint64_t round_seed = round_seed_for(seed, episode);
            SimState state{generate_er(scenario.agents, scenario.edge_probability, round_seed),
                           HistoryStore(scenario.agents), round_seed, scenario.payoff};
            const int n = scenario.agents;

            double discounted_return = 0.0;
            double discount_power = 1.0;
            double coop_sum = 0.0;

            std::vector<InfoTier> noinfo(static_cast<std::size_t>(n), InfoTier::NoInfo);
            StepRecord rec = run_step(state, noinfo, agents, 0);
            discounted_return += discount_power * step_reward(rec, scenario.payoff);
            coop_sum += rec.cooperation_rate;

            for (int t = 1; t < horizon; ++t) {
                std::vector<Observation> observations;
                observations.reserve(static_cast<std::size_t>(n));
                for (AgentId a = 0; a < n; ++a)
                    observations.push_back(build_observation(state.store, state.graph, a, t, horizon));

                RngStream tier_rng(
                    seed_chain(round_seed, kSeedTagTier, static_cast<std::uint64_t>(t)));
                const auto tiers =
                    select_tiers(result.net, observations, t, SelectMode::Sample, tier_rng);

                rec = run_step(state, tiers, agents, t);
                const double reward = step_reward(rec, scenario.payoff);
                discount_power *= cfg.discount;
                discounted_return += discount_power * reward;
                coop_sum += rec.cooperation_rate;

                const bool terminal = (t == horizon - 1);
                std::vector<Transition> batch;
                batch.reserve(static_cast<std::size_t>(n));
                for (AgentId a = 0; a < n; ++a) {
                    Transition tr;
                    tr.obs = observations[static_cast<std::size_t>(a)];
                    tr.action_index = action_index_from_tier(tiers[static_cast<std::size_t>(a)]);
                    tr.reward = reward;
                    tr.next_obs = build_observation(state.store, state.graph, a, t + 1, horizon);
                    tr.terminal = terminal;
                    batch.push_back(tr);
                }
                td_update(result.net, batch, cfg);
            }

            result.curve.push_back(
                {episode, discounted_return, coop_sum / static_cast<double>(horizon)});
        } catch (const TrainingError& e) {
            throw TrainingError("episode " + std::to_string(episode) + ": " + e.what());
        }
    }
    return result;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_learning_curve_csv(const std::string& path, const std::vector<EpisodePoint>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write learning curve '" + path + "'");
    out << "episode,discounted_return,mean_coop\n";
    for (const auto& point : curve)
        out << point.episode << ',' << format_double(point.discounted_return) << ','
            << format_double(point.mean_cooperation) << '\n';
}

std::vector<InfoTier> GovernorTierSelector::select(const HistoryStore& store, const Graph& g,
                                                   int step, int horizon) {
    std::vector<Observation> observations;
    observations.reserve(static_cast<std::size_t>(g.agent_count()));
    for (AgentId a = 0; a < g.agent_count(); ++a)
        observations.push_back(build_observation(store, g, a, step, horizon));
    RngStream unused(0);
    return select_tiers(*net_, observations, step, SelectMode::Greedy, unused);
}

}  // namespace coopgov
