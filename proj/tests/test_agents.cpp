#include "coopgov/agents.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace coopgov;

namespace {

constexpr Action C = Action::Cooperate;
constexpr Action D = Action::Defect;

const CalibrationTable& shipped() {
    static const CalibrationTable table =
        load_calibration(std::string(COOPGOV_DATA_DIR) + "/calibration.json");
    return table;
}

InformationView la_view(ActionPair pair) {
    InformationView v;
    v.tier = InfoTier::LA;
    v.last_pair = pair;
    return v;
}

InformationView nr_view(ActionPair pair, CoopBucket own, CoopBucket nbhd) {
    InformationView v;
    v.tier = InfoTier::LA_NR;
    v.last_pair = pair;
    v.own_bucket = own;
    v.neighborhood_bucket = nbhd;
    return v;
}

double observed_frequency(const TableSla& sla, const InformationView& view, int trials,
                          std::uint64_t seed) {
    RngStream rng(seed);
    int coop = 0;
    for (int k = 0; k < trials; ++k)
        if (sla.decide(view, rng) == C) ++coop;
    return static_cast<double>(coop) / trials;
}

}  // namespace

TEST(TableSlaTest, ProbabilityLookups) {
    TableSla sla(shipped());
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(la_view({C, C})), 1.0);
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(la_view({D, D})), 0.49);
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(
                         nr_view({D, D}, CoopBucket::Sometimes, CoopBucket::Often)),
                     0.98);

    InformationView no_info;
    no_info.tier = InfoTier::NoInfo;
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(no_info), 0.5);
}

TEST(TableSlaTest, UnilateralOutcomesAlwaysDefect) {
    TableSla sla(shipped());
    RngStream rng(11);
    for (int k = 0; k < 500; ++k) {
        EXPECT_EQ(sla.decide(la_view({C, D}), rng), D);
        EXPECT_EQ(sla.decide(la_view({D, C}), rng), D);
    }
}

TEST(TableSlaTest, MutualCooperationAlwaysCooperates) {
    TableSla sla(shipped());
    RngStream rng(12);
    for (int k = 0; k < 500; ++k) EXPECT_EQ(sla.decide(la_view({C, C}), rng), C);
}

TEST(TableSlaTest, FrequenciesRecoverTableValues) {
    TableSla sla(shipped());
    EXPECT_NEAR(observed_frequency(sla, la_view({D, D}), 10000, 101), 0.49, 0.02);
    EXPECT_NEAR(observed_frequency(
                    sla, nr_view({D, D}, CoopBucket::Sometimes, CoopBucket::Sometimes), 10000, 102),
                0.289, 0.02);
    InformationView no_info;
    no_info.tier = InfoTier::NoInfo;
    EXPECT_NEAR(observed_frequency(sla, no_info, 10000, 103), 0.5, 0.02);
}

TEST(TableSlaTest, AbsentLastPairFallsBackToFirstMove) {
    TableSla sla(shipped());
    InformationView view;
    view.tier = InfoTier::LA;  // no last_pair yet
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(view), 0.5);
}

TEST(TableSlaTest, MissingBucketsFallBackToLastActionTable) {
    TableSla sla(shipped());
    InformationView view;
    view.tier = InfoTier::LA_NR;
    view.last_pair = ActionPair{D, D};
    view.own_bucket = CoopBucket::Sometimes;  // neighborhood bucket still absent
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(view), 0.49);

    view.own_bucket.reset();
    EXPECT_DOUBLE_EQ(sla.cooperation_probability(view), 0.49);
}

TEST(TableSlaTest, ShapeMismatchRejected) {
    TableSla sla(shipped());
    InformationView view;
    view.tier = InfoTier::LA;
    view.last_pair = ActionPair{C, C};
    view.own_bucket = CoopBucket::Often;
    RngStream rng(0);
    EXPECT_THROW(sla.decide(view, rng), std::invalid_argument);
}

TEST(TableSlaTest, DeterministicReplay) {
    TableSla sla(shipped());
    std::vector<InformationView> views = {
        la_view({D, D}),
        nr_view({D, D}, CoopBucket::Sometimes, CoopBucket::Sometimes),
        la_view({C, C}),
        nr_view({C, C}, CoopBucket::Rarely, CoopBucket::Sometimes),
    };
    std::vector<Action> first, second;
    {
        RngStream rng(4242);
        for (int rep = 0; rep < 50; ++rep)
            for (const auto& view : views) first.push_back(sla.decide(view, rng));
    }
    {
        RngStream rng(4242);
        for (int rep = 0; rep < 50; ++rep)
            for (const auto& view : views) second.push_back(sla.decide(view, rng));
    }
    EXPECT_EQ(first, second);
}

TEST(TableSlaTest, FreeFunctionMatchesClass) {
    RngStream a(7), b(7);
    TableSla sla(shipped());
    for (int k = 0; k < 20; ++k)
        EXPECT_EQ(sla.decide(la_view({D, D}), a), table_sla_decide(shipped(), la_view({D, D}), b));
}
