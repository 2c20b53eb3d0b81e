#include "coopgov/governor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "coopgov/agents.hpp"

using namespace coopgov;

namespace {

constexpr Action C = Action::Cooperate;
constexpr Action D = Action::Defect;

const CalibrationTable& shipped() {
    static const CalibrationTable table =
        load_calibration(std::string(COOPGOV_DATA_DIR) + "/calibration.json");
    return table;
}

StepRecord step_with(std::vector<std::pair<Action, Action>> pairs) {
    StepRecord rec;
    PayoffMatrix m;
    AgentId i = 0;
    for (auto [a, b] : pairs) {
        auto [pi, pj] = payoff({a, b}, m);
        rec.interactions.push_back({i, i + 1, a, b, pi, pj});
        i += 2;
    }
    return rec;
}

ScenarioConfig small_scenario() {
    ScenarioConfig cfg;
    cfg.agents = 6;
    cfg.edge_probability = 0.5;
    cfg.steps_per_round = 6;
    cfg.rounds = 2;
    cfg.seed = 31;
    return cfg;
}

}  // namespace

TEST(ObservationTest, EmptyHistoryIsAllZero) {
    Graph g(4, {{0, 1}, {1, 2}});
    HistoryStore store(4);
    const Observation obs = build_observation(store, g, 0, 0, 20);
    EXPECT_EQ(obs.as_array(), (std::array<double, 4>{0.0, 0.0, 0.0, 0.0}));
}

TEST(ObservationTest, DirectAssembly) {
    Graph g(3, {{0, 1}, {1, 2}});
    HistoryStore store(3);
    store.record(0, 1, {C, D});  // agent0 1C/1, agent1 0C/1
    store.record(0, 1, {D, D});  // agent0 1C/2, agent1 0C/2
    store.record(1, 2, {C, D});  // agent1 1C/3
    store.record(1, 2, {D, C});  // agent1 1C/4

    const Observation obs = build_observation(store, g, 0, 1, 20);
    EXPECT_DOUBLE_EQ(obs.own_ratio, 0.5);
    EXPECT_DOUBLE_EQ(obs.neighborhood_ratio, 0.25);  // sole neighbor pooled 1C/4
    EXPECT_DOUBLE_EQ(obs.mutual_coop_frac, 0.0);
    EXPECT_DOUBLE_EQ(obs.time_frac, 1.0 / 20.0);
}

TEST(ObservationTest, TerminalAllMutualCooperation) {
    Graph g(2, {{0, 1}});
    HistoryStore store(2);
    store.record(0, 1, {C, C});
    const Observation obs = build_observation(store, g, 0, 20, 20);
    EXPECT_DOUBLE_EQ(obs.mutual_coop_frac, 1.0);
    EXPECT_DOUBLE_EQ(obs.time_frac, 1.0);
}

TEST(ObservationTest, ComponentsStayInUnitInterval) {
    const auto table = shipped();
    TableSla sla(table);
    ScenarioConfig cfg = small_scenario();
    SimState state{generate_er(cfg.agents, cfg.edge_probability, 5),
                   HistoryStore(cfg.agents), 5, cfg.payoff};
    for (int t = 0; t < cfg.steps_per_round; ++t) {
        for (AgentId a = 0; a < cfg.agents; ++a) {
            const auto arr = build_observation(state.store, state.graph, a, t,
                                               cfg.steps_per_round)
                                 .as_array();
            for (double x : arr) {
                EXPECT_GE(x, 0.0);
                EXPECT_LE(x, 1.0);
            }
        }
        std::vector<InfoTier> tiers(static_cast<std::size_t>(cfg.agents),
                                    t == 0 ? InfoTier::NoInfo : InfoTier::LA);
        run_step(state, tiers, sla, t);
    }
}

TEST(SelectTiersTest, StepZeroForcesNoInfoWithoutDraws) {
    const PolicyNetwork net = PolicyNetwork::zeros(8);
    std::vector<Observation> obs(5);
    RngStream rng(1);
    const auto tiers = select_tiers(net, obs, 0, SelectMode::Sample, rng);
    EXPECT_EQ(tiers, std::vector<InfoTier>(5, InfoTier::NoInfo));
    EXPECT_EQ(rng.next_u64(), RngStream(1).next_u64());  // stream untouched
}

TEST(SelectTiersTest, ZeroNetworkSamplesUniformly) {
    const PolicyNetwork net = PolicyNetwork::zeros(8);
    std::vector<Observation> obs(1);
    obs[0] = {0.5, 0.5, 0.5, 0.5};
    RngStream rng(123);
    std::array<int, kTierActionCount> counts{};
    const int draws = 30000;
    for (int k = 0; k < draws; ++k) {
        const auto tiers = select_tiers(net, obs, 1, SelectMode::Sample, rng);
        counts[static_cast<std::size_t>(action_index_from_tier(tiers[0]))] += 1;
    }
    for (int count : counts)
        EXPECT_NEAR(static_cast<double>(count) / draws, 1.0 / 3.0, 0.02);
}

TEST(SelectTiersTest, GreedyIsDeterministicArgmax) {
    PolicyNetwork net = PolicyNetwork::zeros(8);
    net.actor().set_param(net.actor().param_count() - 1, 1.0);  // bias the LA_NR logit
    std::vector<Observation> obs(3);
    RngStream rng(0);
    const auto tiers = select_tiers(net, obs, 5, SelectMode::Greedy, rng);
    EXPECT_EQ(tiers, std::vector<InfoTier>(3, InfoTier::LA_NR));
    RngStream rng2(99);
    EXPECT_EQ(select_tiers(net, obs, 5, SelectMode::Greedy, rng2), tiers);
}

TEST(StepRewardTest, TableThreeAnchors) {
    PayoffMatrix m;
    EXPECT_DOUBLE_EQ(step_reward(step_with({{C, C}, {C, C}}), m), 6.0);
    EXPECT_DOUBLE_EQ(step_reward(step_with({{D, D}, {D, D}}), m), 2.0);
    EXPECT_DOUBLE_EQ(step_reward(step_with({{C, C}, {D, D}}), m), 4.0);
}

TEST(StepRewardTest, NoInteractionsIsAnError) {
    EXPECT_THROW(step_reward(StepRecord{}, PayoffMatrix()), std::invalid_argument);
}

TEST(TdUpdateTest, TerminalTargetWithZeroCritic) {
    PolicyNetwork net = PolicyNetwork::zeros(8);
    TrainingConfig cfg;
    cfg.hidden = 8;

    Transition tr;
    tr.obs = {0.5, 0.5, 0.0, 0.5};
    tr.action_index = 0;
    tr.reward = 6.0;
    tr.terminal = true;

    const auto diag = td_update(net, std::span<const Transition>(&tr, 1), cfg);
    // V(obs) = 0 and no bootstrap: target 6.0, advantage 6.0.
    EXPECT_DOUBLE_EQ(diag.mean_advantage, 6.0);
    EXPECT_DOUBLE_EQ(diag.critic_loss, 36.0);
    EXPECT_GT(net.value(tr.obs.as_array()), 0.0);  // moved toward the target
}

TEST(TdUpdateTest, ZeroAdvantageZeroEntropyLeavesActorAlone) {
    PolicyNetwork net = PolicyNetwork::zeros(8);
    net.actor().set_param(net.actor().param_count() - 2, 0.7);  // non-uniform policy
    const auto before = net.actor().params();

    TrainingConfig cfg;
    cfg.hidden = 8;
    cfg.entropy_coeff = 0.0;

    Transition tr;
    tr.obs = {0.2, 0.2, 0.2, 0.2};
    tr.action_index = 1;
    tr.reward = 0.0;  // V = 0, terminal -> advantage exactly 0
    tr.terminal = true;

    td_update(net, std::span<const Transition>(&tr, 1), cfg);
    EXPECT_EQ(net.actor().params(), before);
}

TEST(TdUpdateTest, ZeroAdvantageEntropyPushesTowardUniform) {
    PolicyNetwork net = PolicyNetwork::zeros(8);
    net.actor().set_param(net.actor().param_count() - 2, 0.7);
    const auto obs_arr = std::array<double, 4>{0.2, 0.2, 0.2, 0.2};
    const auto probs_before = net.action_probabilities(obs_arr);
    const double peak_before = *std::max_element(probs_before.begin(), probs_before.end());

    TrainingConfig cfg;
    cfg.hidden = 8;
    cfg.entropy_coeff = 0.01;
    cfg.lr_actor = 0.5;  // exaggerate the entropy step to observe it

    Transition tr;
    tr.obs = {0.2, 0.2, 0.2, 0.2};
    tr.action_index = 1;
    tr.reward = 0.0;
    tr.terminal = true;

    td_update(net, std::span<const Transition>(&tr, 1), cfg);
    const auto probs_after = net.action_probabilities(obs_arr);
    const double peak_after = *std::max_element(probs_after.begin(), probs_after.end());
    EXPECT_LT(peak_after, peak_before);
}

TEST(TdUpdateTest, EmptyBatchRejected) {
    PolicyNetwork net = PolicyNetwork::zeros(8);
    TrainingConfig cfg;
    cfg.hidden = 8;
    EXPECT_THROW(td_update(net, std::span<const Transition>(), cfg), TrainingError);
}

TEST(TdUpdateTest, NonFiniteRewardRaisesTrainingError) {
    PolicyNetwork net = PolicyNetwork::zeros(8);
    TrainingConfig cfg;
    cfg.hidden = 8;

    Transition tr;
    tr.obs = {0.5, 0.5, 0.0, 0.5};
    tr.action_index = 0;
    tr.reward = std::numeric_limits<double>::infinity();
    tr.terminal = true;

    EXPECT_THROW(td_update(net, std::span<const Transition>(&tr, 1), cfg), TrainingError);
}

// Frozen-environment fixed point: constant reward c on a self-looping
// observation drives V toward c / (1 - discount).
TEST(TdUpdateTest, CriticConvergesToDiscountedFixedPoint) {
    TrainingConfig cfg;  // paper rates: critic 0.005, discount 0.99
    cfg.hidden = 256;
    PolicyNetwork net(cfg.hidden, 2027);

    const double c = 1.0;
    Transition tr;
    tr.obs = {0.5, 0.25, 0.0, 0.05};
    tr.next_obs = tr.obs;
    tr.action_index = 0;
    tr.reward = c;
    tr.terminal = false;

    const double target = c / (1.0 - cfg.discount);
    for (int k = 0; k < 100000; ++k) td_update(net, std::span<const Transition>(&tr, 1), cfg);
    const double v = net.value(tr.obs.as_array());
    EXPECT_NEAR(v, target, 0.05 * target);
}

TEST(TrainTest, ZeroEpisodesReturnsInitialNetwork) {
    ScenarioConfig scenario = small_scenario();
    TrainingConfig cfg;
    cfg.episodes = 0;
    cfg.hidden = 16;
    TableSla sla(shipped());

    const auto result = train(scenario, cfg, 77, sla);
    const PolicyNetwork fresh(cfg.hidden, seed_chain(77, kSeedTagInit));
    EXPECT_EQ(result.net.actor().params(), fresh.actor().params());
    EXPECT_EQ(result.net.critic().params(), fresh.critic().params());
    EXPECT_TRUE(result.curve.empty());
}

TEST(TrainTest, FixedSeedReplaysBitForBit) {
    ScenarioConfig scenario = small_scenario();
    TrainingConfig cfg;
    cfg.episodes = 4;
    cfg.hidden = 16;
    TableSla sla(shipped());

    const auto a = train(scenario, cfg, 123, sla);
    const auto b = train(scenario, cfg, 123, sla);
    ASSERT_EQ(a.curve.size(), b.curve.size());
    for (std::size_t k = 0; k < a.curve.size(); ++k) {
        EXPECT_EQ(a.curve[k].episode, b.curve[k].episode);
        EXPECT_EQ(a.curve[k].discounted_return, b.curve[k].discounted_return);
        EXPECT_EQ(a.curve[k].mean_cooperation, b.curve[k].mean_cooperation);
    }
    EXPECT_EQ(a.net.actor().params(), b.net.actor().params());
    EXPECT_EQ(a.net.critic().params(), b.net.critic().params());
}

TEST(TrainTest, CurveCsvFormat) {
    std::vector<EpisodePoint> curve = {{0, 12.5, 0.5}, {1, 13.0, 0.625}};
    const std::string path = ::testing::TempDir() + "coopgov_curve_test.csv";
    write_learning_curve_csv(path, curve);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "episode,discounted_return,mean_coop");
    std::getline(in, line);
    EXPECT_EQ(line, "0,12.5,0.5");
    std::getline(in, line);
    EXPECT_EQ(line, "1,13,0.625");
}

TEST(GovernorSelectorTest, RoundTrajectoriesObeyForcedTierRule) {
    ScenarioConfig scenario = small_scenario();
    TrainingConfig cfg;
    cfg.episodes = 3;
    cfg.hidden = 16;
    TableSla sla(shipped());

    const auto trained = train(scenario, cfg, 9, sla);
    GovernorTierSelector selector(trained.net);
    for (int r = 0; r < 3; ++r) {
        const RoundLog log = run_round(scenario, r, sla, selector);
        ASSERT_TRUE(log.valid);
        for (const auto& step : log.steps)
            for (InfoTier tier : step.tiers) {
                if (step.step == 0)
                    EXPECT_EQ(tier, InfoTier::NoInfo);
                else
                    EXPECT_NE(tier, InfoTier::NoInfo);
            }
    }
}
