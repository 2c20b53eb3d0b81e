#include "coopgov/ledger.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "coopgov/rng.hpp"

using namespace coopgov;

namespace {

constexpr Action C = Action::Cooperate;
constexpr Action D = Action::Defect;

}  // namespace

TEST(BucketTest, CaptionBoundaries) {
    EXPECT_EQ(bucket_for(0.20), CoopBucket::Rarely);
    EXPECT_EQ(bucket_for(0.50), CoopBucket::Sometimes);
    EXPECT_EQ(bucket_for(0.33), CoopBucket::Sometimes);
    EXPECT_EQ(bucket_for(0.66), CoopBucket::Sometimes);
    EXPECT_EQ(bucket_for(0.67), CoopBucket::Often);
    EXPECT_EQ(bucket_for(0.0), CoopBucket::Rarely);
    EXPECT_EQ(bucket_for(1.0), CoopBucket::Often);
}

TEST(BucketTest, RejectsOutOfRange) {
    EXPECT_THROW(bucket_for(-0.01), std::invalid_argument);
    EXPECT_THROW(bucket_for(1.01), std::invalid_argument);
}

TEST(HistoryStoreTest, RecordMirrorsPairs) {
    HistoryStore store(3);
    store.record(0, 1, {C, D});
    ASSERT_EQ(store.pair_history(0, 1).size(), 1u);
    EXPECT_EQ(store.pair_history(0, 1)[0], (ActionPair{C, D}));
    ASSERT_EQ(store.pair_history(1, 0).size(), 1u);
    EXPECT_EQ(store.pair_history(1, 0)[0], (ActionPair{D, C}));

    EXPECT_EQ(store.action_count(0), 1);
    EXPECT_EQ(store.coop_count(0), 1);
    EXPECT_EQ(store.action_count(1), 1);
    EXPECT_EQ(store.coop_count(1), 0);
}

TEST(HistoryStoreTest, TwoRecordsGrowBothLists) {
    HistoryStore store(2);
    store.record(0, 1, {C, C});
    store.record(0, 1, {D, C});
    EXPECT_EQ(store.pair_history(0, 1).size(), 2u);
    EXPECT_EQ(store.pair_history(1, 0).size(), 2u);
    EXPECT_EQ(store.last_pair(0, 1), (ActionPair{D, C}));
    EXPECT_EQ(store.last_pair(1, 0), (ActionPair{C, D}));
}

TEST(HistoryStoreTest, SelfInteractionRejected) {
    HistoryStore store(2);
    EXPECT_THROW(store.record(1, 1, {C, C}), std::invalid_argument);
}

TEST(HistoryStoreTest, CoopRatio) {
    HistoryStore store(3);
    store.record(0, 1, {C, D});
    store.record(0, 2, {C, D});
    store.record(0, 1, {D, D});
    ASSERT_TRUE(store.coop_ratio(0).has_value());
    EXPECT_DOUBLE_EQ(*store.coop_ratio(0), 2.0 / 3.0);

    EXPECT_FALSE(HistoryStore(2).coop_ratio(0).has_value());

    HistoryStore defector(2);
    defector.record(0, 1, {D, C});
    defector.record(0, 1, {D, C});
    EXPECT_DOUBLE_EQ(*defector.coop_ratio(0), 0.0);
}

TEST(HistoryStoreTest, NeighborhoodRatioIsPooled) {
    // Agent 0's neighbors are 1 and 2; agent 1 acted [C], agent 2 [D,D,D].
    Graph g(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    HistoryStore store(4);
    store.record(1, 3, {C, D});
    store.record(2, 3, {D, D});
    store.record(2, 3, {D, D});
    store.record(2, 3, {D, D});
    ASSERT_TRUE(store.neighborhood_ratio(g, 0).has_value());
    EXPECT_DOUBLE_EQ(*store.neighborhood_ratio(g, 0), 1.0 / 4.0);
}

TEST(HistoryStoreTest, NeighborhoodRatioSingleNeighborHalf) {
    Graph g(3, {{0, 1}, {1, 2}});
    HistoryStore store(3);
    store.record(1, 2, {C, C});
    store.record(1, 2, {D, C});
    // Agent 0's only neighbor (1) played [C, D].
    EXPECT_DOUBLE_EQ(*store.neighborhood_ratio(g, 0), 0.5);
}

TEST(HistoryStoreTest, NeighborhoodRatioAbsentWithoutActiveNeighbors) {
    Graph g(3, {{0, 1}});
    HistoryStore store(3);
    EXPECT_FALSE(store.neighborhood_ratio(g, 0).has_value());
    EXPECT_FALSE(store.neighborhood_ratio(g, 2).has_value());  // isolated
}

TEST(HistoryStoreTest, SingleNeighborPoolEqualsThatNeighborsRatio) {
    Graph g(2, {{0, 1}});
    HistoryStore store(2);
    RngStream rng(99);
    for (int k = 0; k < 37; ++k)
        store.record(1, 0, {rng.bernoulli(0.6) ? C : D, rng.bernoulli(0.5) ? C : D});
    EXPECT_DOUBLE_EQ(*store.neighborhood_ratio(g, 0), *store.coop_ratio(1));
}

TEST(HistoryStoreTest, RatioTimesCountIsIntegral) {
    HistoryStore store(4);
    RngStream rng(5);
    for (int k = 0; k < 200; ++k) {
        const AgentId i = static_cast<AgentId>(rng.next_u64() % 4);
        AgentId j = static_cast<AgentId>(rng.next_u64() % 4);
        if (i == j) j = (j + 1) % 4;
        store.record(i, j, {rng.bernoulli(0.5) ? C : D, rng.bernoulli(0.5) ? C : D});
    }
    for (AgentId a = 0; a < 4; ++a) {
        const auto ratio = store.coop_ratio(a);
        ASSERT_TRUE(ratio.has_value());
        EXPECT_GE(*ratio, 0.0);
        EXPECT_LE(*ratio, 1.0);
        const double scaled = *ratio * static_cast<double>(store.action_count(a));
        EXPECT_NEAR(scaled, std::round(scaled), 1e-9);
    }
}

TEST(HistoryStoreTest, ClearResetsEverything) {
    HistoryStore store(2);
    store.record(0, 1, {C, C});
    store.clear();
    EXPECT_FALSE(store.coop_ratio(0).has_value());
    EXPECT_TRUE(store.pair_history(0, 1).empty());
}

TEST(BuildViewTest, NoInfoCarriesNothing) {
    Graph g(2, {{0, 1}});
    HistoryStore store(2);
    store.record(0, 1, {C, C});
    const auto view = build_view(store, g, InfoTier::NoInfo, 0, 1);
    EXPECT_FALSE(view.last_pair.has_value());
    EXPECT_FALSE(view.own_bucket.has_value());
    EXPECT_FALSE(view.opponent_bucket.has_value());
    EXPECT_FALSE(view.neighborhood_bucket.has_value());
}

TEST(BuildViewTest, LastActionOnly) {
    Graph g(2, {{0, 1}});
    HistoryStore store(2);
    store.record(0, 1, {C, C});
    const auto view = build_view(store, g, InfoTier::LA, 0, 1);
    EXPECT_EQ(view.last_pair, (ActionPair{C, C}));
    EXPECT_FALSE(view.own_bucket.has_value());
    EXPECT_FALSE(view.neighborhood_bucket.has_value());
}

TEST(BuildViewTest, NeighborhoodTierBuckets) {
    // Agent 0: ratio 0.5 -> Sometimes; neighborhood pooled 0.7 -> Often.
    Graph g(3, {{0, 1}, {0, 2}, {1, 2}});
    HistoryStore store(3);
    store.record(0, 1, {C, D});
    store.record(0, 2, {D, C});
    for (int k = 0; k < 3; ++k) store.record(1, 2, {C, C});
    // Neighbors 1 and 2 pooled: 1 played [D,C,C,C], 2 played [C,C,C,C] -> 7/8.
    const double pooled = *store.neighborhood_ratio(g, 0);
    EXPECT_DOUBLE_EQ(pooled, 7.0 / 8.0);
    const auto view = build_view(store, g, InfoTier::LA_NR, 0, 1);
    EXPECT_EQ(view.own_bucket, bucket_for(*store.coop_ratio(0)));
    EXPECT_EQ(view.neighborhood_bucket, bucket_for(pooled));
    EXPECT_FALSE(view.opponent_bucket.has_value());
    EXPECT_EQ(view.last_pair, (ActionPair{C, D}));
}

TEST(BuildViewTest, OpponentTierBuckets) {
    Graph g(2, {{0, 1}});
    HistoryStore store(2);
    store.record(0, 1, {C, D});
    const auto view = build_view(store, g, InfoTier::LA_AR, 0, 1);
    EXPECT_EQ(view.own_bucket, CoopBucket::Often);      // 1/1 C
    EXPECT_EQ(view.opponent_bucket, CoopBucket::Rarely);  // 0/1
    EXPECT_FALSE(view.neighborhood_bucket.has_value());
}

TEST(BuildViewTest, NonEdgeRejected) {
    Graph g(3, {{0, 1}});
    HistoryStore store(3);
    EXPECT_THROW(build_view(store, g, InfoTier::LA, 0, 2), std::invalid_argument);
}

TEST(BuildViewTest, MirroringProperty) {
    RngStream rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = generate_er(8, 0.4, 1000 + trial);
        HistoryStore store(8);
        for (int step = 0; step < 5; ++step)
            for (const auto& e : g.edge_list())
                store.record(e.a, e.b, {rng.bernoulli(0.5) ? C : D, rng.bernoulli(0.5) ? C : D});
        for (const auto& e : g.edge_list()) {
            const auto va = build_view(store, g, InfoTier::LA, e.a, e.b);
            const auto vb = build_view(store, g, InfoTier::LA, e.b, e.a);
            ASSERT_TRUE(va.last_pair.has_value());
            ASSERT_TRUE(vb.last_pair.has_value());
            EXPECT_EQ(va.last_pair->swapped(), *vb.last_pair);
        }
    }
}

TEST(BuildViewTest, TierShapeProperty) {
    RngStream rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        Graph g = generate_er(6, 0.5, 500 + trial);
        HistoryStore store(6);
        for (int step = 0; step < 3; ++step)
            for (const auto& e : g.edge_list())
                store.record(e.a, e.b, {rng.bernoulli(0.5) ? C : D, rng.bernoulli(0.5) ? C : D});
        for (const auto& e : g.edge_list())
            for (InfoTier tier : {InfoTier::NoInfo, InfoTier::LA, InfoTier::LA_AR, InfoTier::LA_NR})
                EXPECT_NO_THROW(build_view(store, g, tier, e.a, e.b).validate_shape());
    }
}

TEST(ViewShapeTest, ForbiddenFieldsThrow) {
    InformationView view;
    view.tier = InfoTier::LA;
    view.last_pair = ActionPair{C, C};
    view.neighborhood_bucket = CoopBucket::Often;
    EXPECT_THROW(view.validate_shape(), std::invalid_argument);

    view = {};
    view.tier = InfoTier::NoInfo;
    view.last_pair = ActionPair{C, C};
    EXPECT_THROW(view.validate_shape(), std::invalid_argument);

    view = {};
    view.tier = InfoTier::LA_NR;
    view.opponent_bucket = CoopBucket::Rarely;
    EXPECT_THROW(view.validate_shape(), std::invalid_argument);
}

TEST(TierTest, StringRoundTrip) {
    for (InfoTier tier : {InfoTier::NoInfo, InfoTier::LA, InfoTier::LA_AR, InfoTier::LA_NR})
        EXPECT_EQ(tier_from_string(to_string(tier)), tier);
    EXPECT_THROW(tier_from_string("LA_XA"), std::invalid_argument);
}
