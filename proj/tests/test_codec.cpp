#include <gtest/gtest.h>

#include <vector>

#include <recgraph/codec.hpp>
#include <recgraph/rng.hpp>
#include <recgraph/samplers.hpp>

using namespace recgraph;

TEST(PhiR, TwoLeafTreeFullWindow) {
    const auto t = parse_tree("[(),()]");
    const auto phi = phi_R(t, t.top(), 4, 4);
    EXPECT_TRUE(phi.ok);
    ASSERT_EQ(phi.code.values.size(), 3u);
    EXPECT_EQ(phi.code.lo, -3);
    EXPECT_EQ(phi.code.at(-3), -1);
    EXPECT_EQ(phi.code.at(-2), -1);
    EXPECT_EQ(phi.code.at(-1), 1);
}

TEST(PhiR, BarePathGivesZeros) {
    // chain of four: each succession step has d1 = 1 except the deepest leaf
    const auto t = parse_tree("[((()))]");
    const auto phi = phi_R(t, t.top(), 8, 8);
    EXPECT_TRUE(phi.ok);
    ASSERT_EQ(phi.code.values.size(), 4u);
    EXPECT_EQ(phi.code.values.front(), -1); // the leaf
    for (std::size_t i = 1; i < phi.code.values.size(); ++i)
        EXPECT_EQ(phi.code.values[i], 0);
}

TEST(PhiR, CensoredChildCountReported) {
    auto t = parse_tree("[(),?()]");
    // the censored vertex has unknown children: phi through it must censor
    const auto phi = phi_R(t, t.top(), 4, 0);
    EXPECT_FALSE(phi.ok);
    ASSERT_TRUE(phi.censored_at.has_value());
}

TEST(PsiR, TwoLeafCodeRebuildsTree) {
    const CodeSequence y{-3, {-1, -1, 1}};
    const auto t = psi_R(y);
    VertexId zero = kNoVertex;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.at(static_cast<VertexId>(i)).label == 0) zero = static_cast<VertexId>(i);
    ASSERT_NE(zero, kNoVertex);
    ASSERT_EQ(t.d1(zero), 2u);
    EXPECT_TRUE(t.at(t.at(zero).children[0]).children.empty());
    EXPECT_TRUE(t.at(t.at(zero).children[1]).children.empty());
}

TEST(PsiR, AllZeroCodeIsChain) {
    const CodeSequence y{-4, {0, 0, 0, 0}};
    const auto t = psi_R(y);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LE(t.d1(static_cast<VertexId>(i)), 1u);
    // positions -4..0 connected in a chain
    EXPECT_GE(t.size(), 5u);
}

TEST(PsiR, AllMinusOneIsIsolated) {
    const CodeSequence y{-4, {-1, -1, -1, -1}};
    const auto t = psi_R(y);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_EQ(t.at(t.root()).label, 0);
}

TEST(PsiR, RejectsBadValues) {
    EXPECT_THROW(psi_R(CodeSequence{0, {-2}}), std::invalid_argument);
}

TEST(FiniteCodeCheck, SingleVertexAndTwoLeaf) {
    OrderedTree single;
    single.set_root(single.add_vertex());
    const auto rep1 = finite_code_check(single);
    EXPECT_TRUE(rep1.pass);
    EXPECT_EQ(rep1.total, -1);

    const auto rep2 = finite_code_check(parse_tree("[(),()]"));
    EXPECT_TRUE(rep2.pass); // prefix sums -1, -2, -1
    EXPECT_EQ(rep2.total, -1);
}

TEST(FiniteCodeCheck, GwSamplesAllPass) {
    const auto pi = make_offspring({{0, 0.6}, {1, 0.2}, {2, 0.2}});
    for (long long i = 0; i < 2'000; ++i) {
        const auto t = sample_gw(pi, sample_seed(31, i)).tree;
        const auto rep = finite_code_check(t);
        EXPECT_TRUE(rep.pass) << i;
    }
}

TEST(RoundTrip, PhiPsiIdentityOnFuzzedWindows) {
    const auto law = make_law({{-1, 0.45}, {0, 0.15}, {1, 0.25}, {2, 0.15}});
    Rng rng(606060);
    for (int rep = 0; rep < 3'000; ++rep) {
        const long long len = 4 + static_cast<long long>(rng.next_below(61));
        std::vector<long long> xs(static_cast<std::size_t>(len));
        for (auto& x : xs) x = law.sample(rng.next_unit());
        const long long lo = -static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(len))) - 1;
        const CodeSequence y{lo, xs};
        const auto t = psi_R(y);
        // phi around vertex 0
        VertexId zero = kNoVertex;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t.at(static_cast<VertexId>(i)).label == 0) zero = static_cast<VertexId>(i);
        if (zero == kNoVertex) continue;
        const auto phi = phi_R(t, zero, static_cast<std::size_t>(len) + 2,
                               static_cast<std::size_t>(len) + 2);
        for (long long k = phi.code.lo; k < phi.code.hi(); ++k) {
            if (k < y.lo || k >= y.hi()) continue;
            EXPECT_EQ(phi.code.at(k), y.at(k)) << "rep " << rep << " k " << k;
        }
    }
}

TEST(RoundTrip, ZeroMeanWindowsReproduceIncrements) {
    const auto law = make_law({{-1, 0.5}, {1, 0.5}});
    long long total_matched = 0, total_mismatched = 0, total_censored = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto w = iid_window(law, seed, 4096);
        const auto rep = roundtrip_check(w, 32);
        total_matched += rep.matched;
        total_mismatched += rep.mismatched;
        total_censored += rep.censored;
    }
    EXPECT_EQ(total_mismatched, 0);
    EXPECT_GT(total_matched, 0);
    // censoring confined to window edges
    EXPECT_LT(static_cast<double>(total_censored),
              0.8 * static_cast<double>(total_matched + total_censored));
}

TEST(RoundTrip, AllMinusOneWindow) {
    auto w = iid_window(make_law({{-1, 1.0}}), 5, 64);
    const auto rep = roundtrip_check(w, 16);
    EXPECT_EQ(rep.mismatched, 0);
    EXPECT_GE(rep.matched, 1); // the origin's own code value y_{-1} = -1
}
