#include <gtest/gtest.h>

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <recgraph/explore.hpp>
#include <recgraph/samplers.hpp>
#include <recgraph/stats.hpp>

using namespace recgraph;

namespace {

OffspringLaw subcritical() { return make_offspring({{0, 0.6}, {1, 0.2}, {2, 0.2}}); }
OffspringLaw critical() { return make_offspring({{0, 0.5}, {2, 0.5}}); }

OrderedTree single_vertex() {
    OrderedTree t;
    t.set_root(t.add_vertex());
    return t;
}

} // namespace

TEST(EmpiricalLaw, PointMassSamplerGivesSingleKey) {
    auto law = empirical_local_law([](std::uint64_t) { return single_vertex(); }, 2, 500, 1);
    EXPECT_EQ(law.counts.size(), 1u);
    EXPECT_EQ(law.total, 500);
    EXPECT_EQ(law.dropped, 0);
}

TEST(EmpiricalLaw, FrequencyStdScalesAsRootN) {
    // std of a fixed key frequency across repetitions scales like 1/sqrt(N)
    const auto pi = subcritical();
    auto run = [&](long long n, std::uint64_t seed) {
        auto law = empirical_local_law(
            [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, 1, n, seed);
        // frequency of the childless-root key
        const auto t = single_vertex();
        return law.prob_of(ball_key(t, t.root(), 1).key);
    };
    const int reps = 120;
    auto spread = [&](long long n, std::uint64_t base) {
        double sum = 0, sum2 = 0;
        for (int r = 0; r < reps; ++r) {
            const double p = run(n, base + static_cast<std::uint64_t>(r));
            sum += p;
            sum2 += p * p;
        }
        const double mean = sum / reps;
        return std::sqrt(std::max(0.0, sum2 / reps - mean * mean));
    };
    const double sd_n = spread(400, 10'000);
    const double sd_4n = spread(1600, 20'000);
    const double ratio = sd_n / sd_4n; // expect about 2
    EXPECT_GT(ratio, 1.4);
    EXPECT_LT(ratio, 2.9);
}

TEST(EmpiricalLaw, SubcriticalGwDropRateSmall) {
    const auto pi = subcritical();
    auto law = empirical_local_law(
        [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, 2, 50'000, 3, 2);
    EXPECT_LT(static_cast<double>(law.dropped) / static_cast<double>(law.total + law.dropped),
              0.01);
}

TEST(TvDistance, IdenticalAndDisjoint) {
    EmpiricalLaw a;
    a.radius = 2;
    a.total = 10;
    a.counts["k1"] = 6;
    a.counts["k2"] = 4;
    EXPECT_DOUBLE_EQ(tv_distance(a, a), 0.0);

    EmpiricalLaw b;
    b.radius = 2;
    b.total = 5;
    b.counts["k3"] = 5;
    EXPECT_DOUBLE_EQ(tv_distance(a, b), 1.0);

    EmpiricalLaw c;
    c.radius = 3;
    c.total = 5;
    c.counts["k1"] = 5;
    EXPECT_THROW(tv_distance(a, c), std::invalid_argument);
}

TEST(TvDistance, MetricProperties) {
    auto mk = [](std::vector<std::pair<std::string, long long>> counts) {
        EmpiricalLaw l;
        l.radius = 2;
        for (auto& [k, c] : counts) {
            l.counts[k] = c;
            l.total += c;
        }
        return l;
    };
    const auto a = mk({{"x", 3}, {"y", 1}});
    const auto b = mk({{"x", 1}, {"y", 2}, {"z", 1}});
    const auto c = mk({{"y", 1}, {"z", 3}});
    EXPECT_DOUBLE_EQ(tv_distance(a, b), tv_distance(b, a));
    EXPECT_LE(tv_distance(a, c), tv_distance(a, b) + tv_distance(b, c) + 1e-15);
}

TEST(TvDistance, TwoRunsOfOneSamplerAreClose) {
    const auto pi = subcritical();
    auto law1 = empirical_local_law(
        [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, 2, 100'000, 71, 2);
    auto law2 = empirical_local_law(
        [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, 2, 100'000, 72, 2);
    EXPECT_LT(tv_distance(law1, law2), 0.02);
}

TEST(Mtp, IdentityTransportIsExactlyBalanced) {
    TransportFunction h;
    h.id = "diag";
    h.radius = 1;
    h.weight = [](const OrderedTree&, VertexId u, VertexId v) { return u == v ? 1.0 : 0.0; };
    const auto pi = subcritical();
    const auto rep = mtp_check(
        [&](std::uint64_t s) { return sample_tgwt(pi, s).tree; }, h, 2'000, 5);
    EXPECT_DOUBLE_EQ(rep.z_score, 0.0);
    EXPECT_DOUBLE_EQ(rep.mean_out, rep.mean_in);
}

TEST(Mtp, ParentIndicatorBalancesOnTgwt) {
    TransportFunction h;
    h.id = "parent";
    h.radius = 1;
    h.weight = [](const OrderedTree& t, VertexId u, VertexId v) {
        return t.at(u).parent == v ? 1.0 : 0.0;
    };
    const auto pi = make_offspring({{0, 0.5}, {1, 0.5}}); // m = 0.5
    const auto rep = mtp_check(
        [&](std::uint64_t s) { return sample_tgwt(pi, s).tree; }, h, 100'000, 6, 2);
    EXPECT_LT(std::abs(rep.z_score), 3.0);
    EXPECT_NEAR(rep.mean_out, 0.5, 0.02); // P[root has parent] = m
    EXPECT_NEAR(rep.mean_in, 0.5, 0.02);  // E[d1(root)] = m
}

TEST(Mtp, GwNegativeControlFails) {
    TransportFunction h;
    h.id = "parent";
    h.radius = 1;
    h.weight = [](const OrderedTree& t, VertexId u, VertexId v) {
        return t.at(u).parent == v ? 1.0 : 0.0;
    };
    const auto pi = make_offspring({{0, 0.5}, {1, 0.5}});
    const auto rep = mtp_check(
        [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, h, 100'000, 7, 2);
    EXPECT_GT(std::abs(rep.z_score), 10.0);
    EXPECT_DOUBLE_EQ(rep.mean_out, 0.0); // a GW root never has a parent
}

TEST(Mtp, StandardFamilyBalancesOnUnimodularSamplers) {
    const auto fam = standard_transport_family(20);
    ASSERT_EQ(fam.size(), 20u);
    const auto pi = subcritical();
    for (std::size_t i = 0; i < fam.size(); i += 5) {
        const auto rep = mtp_check(
            [&](std::uint64_t s) { return sample_tgwt(pi, s).tree; }, fam[i], 30'000, 100 + i, 2);
        EXPECT_LT(std::abs(rep.z_score), 4.0) << fam[i].id;
    }
}

TEST(Independence, EgwtRootOffspringVsNonDescendantBall) {
    const auto pi = critical();
    auto pair_sampler =
        [&](std::uint64_t s) -> std::optional<std::pair<long long, std::string>> {
        const auto t = sample_egwt(pi, 4, s, 1'000'000, 4).tree;
        if (!ball_fully_resolved(t, t.root(), 2)) return std::nullopt;
        const auto ndt = non_descendant_tree(t, t.root());
        if (!ball_fully_resolved(ndt, ndt.root(), 2)) return std::nullopt;
        return std::make_pair(static_cast<long long>(t.d1(t.root())),
                              ball_key(ndt, ndt.root(), 2).key);
    };
    const auto rep = independence_check(pair_sampler, 20'000, 11, 2, 99);
    EXPECT_LT(rep.tv_joint_vs_product, 0.02);
    EXPECT_GT(rep.p_value, 0.01);
}

TEST(Independence, ConstructedDependenceDetected) {
    // the parent's extra children copy d1(root): maximal dependence
    auto pair_sampler =
        [](std::uint64_t s) -> std::optional<std::pair<long long, std::string>> {
        Rng rng(s);
        OrderedTree t;
        const VertexId parent = t.add_vertex();
        const VertexId root = t.append_child(parent);
        t.set_root(root);
        const long long k = static_cast<long long>(rng.next_below(3));
        for (long long i = 0; i < k; ++i) t.append_child(root);
        for (long long i = 0; i < k; ++i) t.append_child(parent); // copies d1(root)
        const auto ndt = non_descendant_tree(t, root);
        return std::make_pair(k, ball_key(ndt, ndt.root(), 2).key);
    };
    const auto rep = independence_check(pair_sampler, 4'000, 12, 2, 1999);
    EXPECT_LT(rep.p_value, 0.001);
}

TEST(ScalarEstimate, ExactZeroForDeltaZeroGw) {
    const auto est = scalar_estimate(
        [](std::uint64_t s) -> std::optional<double> {
            return static_cast<double>(sample_gw(make_offspring({{0, 1.0}}), s).tree.d1(0));
        },
        1'000, 1);
    EXPECT_DOUBLE_EQ(est.mean, 0.0);
    EXPECT_DOUBLE_EQ(est.ci95, 0.0);
}

TEST(ScalarEstimate, TgwtHasParentMatchesMean) {
    const auto pi = make_offspring({{0, 0.5}, {1, 0.5}});
    const auto est = scalar_estimate(
        [&](std::uint64_t s) -> std::optional<double> {
            const auto t = sample_tgwt(pi, s).tree;
            return t.at(t.root()).parent != kNoVertex ? 1.0 : 0.0;
        },
        50'000, 2, 2);
    EXPECT_NEAR(est.mean, 0.5, 1.6 * est.ci95);
}

TEST(Determinism, ReportsIdenticalAcrossThreadCounts) {
    const auto pi = subcritical();
    auto law1 = empirical_local_law(
        [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, 2, 20'000, 9, 1);
    auto law2 = empirical_local_law(
        [&](std::uint64_t s) { return sample_gw(pi, s).tree; }, 2, 20'000, 9, 2);
    EXPECT_EQ(law1.counts, law2.counts);
    EXPECT_EQ(law1.total, law2.total);

    TransportFunction h = standard_transport_family(1)[0];
    const auto r1 = mtp_check([&](std::uint64_t s) { return sample_tgwt(pi, s).tree; }, h, 5'000, 10, 1);
    const auto r2 = mtp_check([&](std::uint64_t s) { return sample_tgwt(pi, s).tree; }, h, 5'000, 10, 2);
    EXPECT_DOUBLE_EQ(r1.mean_out, r2.mean_out);
    EXPECT_DOUBLE_EQ(r1.z_score, r2.z_score);
}
