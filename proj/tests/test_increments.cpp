#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <recgraph/increments.hpp>

using namespace recgraph;

namespace {

IncrementLaw bernoulli_pm1(double p_minus) {
    return make_law({{-1, p_minus}, {1, 1.0 - p_minus}});
}

} // namespace

TEST(IncrementLaw, MeanOfSymmetricLawIsZero) {
    EXPECT_DOUBLE_EQ(mean_of(bernoulli_pm1(0.5)), 0.0);
}

TEST(IncrementLaw, MeanOfPointMass) {
    EXPECT_DOUBLE_EQ(mean_of(make_law({{-1, 1.0}})), -1.0);
}

TEST(IncrementLaw, MeanOfBiasedLaw) {
    EXPECT_DOUBLE_EQ(mean_of(bernoulli_pm1(0.25)), 0.5);
}

TEST(IncrementLaw, RejectsBadLaws) {
    EXPECT_THROW(make_law({{-1, 0.5}, {1, 0.6}}), std::invalid_argument);
    EXPECT_THROW(make_law({{0, 0.5}, {1, 0.5}}), std::invalid_argument); // no -1 atom
    EXPECT_THROW(make_law({{-2, 0.5}, {1, 0.5}}), std::invalid_argument);
    EXPECT_NO_THROW(make_law({{-2, 0.5}, {1, 0.5}}, IncrementLaw::Kind::GeneralInteger));
}

TEST(IidWindow, SameSeedSameValues) {
    const auto law = bernoulli_pm1(0.25);
    auto w1 = iid_window(law, 42);
    auto w2 = iid_window(law, 42);
    ASSERT_TRUE(w1.ensure_index(-500));
    ASSERT_TRUE(w1.ensure_index(500));
    // opposite extension order
    ASSERT_TRUE(w2.ensure_index(500));
    ASSERT_TRUE(w2.ensure_index(-500));
    for (long long n = -500; n <= 500; ++n) {
        EXPECT_EQ(w1.x(n), w2.x(n)) << n;
        EXPECT_EQ(w1.sum(n), w2.sum(n)) << n;
    }
}

TEST(IidWindow, PointMassDrawsOnlyMinusOne) {
    auto w = iid_window(make_law({{-1, 1.0}}), 7);
    ASSERT_TRUE(w.ensure_index(-100));
    ASSERT_TRUE(w.ensure_index(100));
    for (long long n = -100; n <= 100; ++n) EXPECT_EQ(w.x(n), -1);
}

TEST(IidWindow, EmpiricalFrequencyMatchesBinomialCI) {
    const auto law = bernoulli_pm1(0.25);
    auto w = iid_window(law, 20240601, /*extension_budget=*/1024);
    const long long n_draws = 1'000'000;
    ASSERT_TRUE(w.ensure_index(n_draws - 1));
    long long minus = 0;
    for (long long n = 0; n < n_draws; ++n)
        if (w.x(n) == -1) ++minus;
    const double phat = static_cast<double>(minus) / static_cast<double>(n_draws);
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(n_draws));
    EXPECT_NEAR(phat, 0.25, 3.0 * sigma);
}

TEST(IidWindow, PrefixSumsReconstructIncrements) {
    auto w = iid_window(bernoulli_pm1(0.5), 99);
    ASSERT_TRUE(w.ensure_index(-200));
    ASSERT_TRUE(w.ensure_index(200));
    for (long long n = -200; n < 200; ++n) EXPECT_EQ(w.sum(n + 1) - w.sum(n), w.x(n));
    EXPECT_EQ(w.sum(0), 0);
}

TEST(PartialSum, EmptySingleAndWindowed) {
    auto w = deterministic_window({-1, -1, 2}, -3);
    EXPECT_EQ(partial_sum(w, -1, -1), 0);
    EXPECT_EQ(partial_sum(w, -1, 0), 2);
    EXPECT_EQ(partial_sum(w, -3, 0), 0);
    EXPECT_THROW(partial_sum(w, 0, -1), std::invalid_argument);
    EXPECT_THROW((void)w.sum(5), std::out_of_range);
}

TEST(PartialSum, Additivity) {
    auto w = iid_window(bernoulli_pm1(0.5), 3);
    ASSERT_TRUE(w.ensure_index(63));
    ASSERT_TRUE(w.ensure_index(-64));
    for (long long j = -64; j <= 0; j += 16)
        for (long long k = j; k <= 32; k += 8)
            for (long long m = k; m <= 63; m += 16)
                EXPECT_EQ(partial_sum(w, j, k) + partial_sum(w, k, m), partial_sum(w, j, m));
}

TEST(QueueWindow, IncrementsArePlusMinusOne) {
    QueueChainParams params{1.0, 2.0};
    auto w = queue_window(params, 5);
    ASSERT_TRUE(w.ensure_index(-2000));
    ASSERT_TRUE(w.ensure_index(2000));
    for (long long n = -2000; n < 2000; ++n) EXPECT_TRUE(w.x(n) == 1 || w.x(n) == -1) << w.x(n);
}

TEST(QueueWindow, BarrierCertificateBoundsSums) {
    QueueChainParams params{1.0, 2.0};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto w = queue_window(params, seed);
        const auto cert = w.certified_past_sup();
        ASSERT_TRUE(cert.has_value());
        ASSERT_TRUE(w.ensure_index(-5000));
        ASSERT_TRUE(w.ensure_index(5000));
        for (long long n = -5000; n <= 5000; ++n) EXPECT_LE(w.sum(n), *cert);
    }
}

TEST(QueueWindow, EmpiricalMeanNearZero) {
    QueueChainParams params{1.0, 2.0};
    auto w = queue_window(params, 1234, 1024);
    const long long n_steps = 1'000'000;
    ASSERT_TRUE(w.ensure_index(n_steps - 1));
    long long total = w.sum(n_steps);
    // Var(X) = 1; the stationary chain mixes fast, allow a generous multiple.
    const double sd = std::sqrt(static_cast<double>(n_steps));
    EXPECT_NEAR(static_cast<double>(total), 0.0, 12.0 * sd);
}

// Oracle: stationary law of the jump chain solved as a linear system on the
// truncated state space {0..200} (power iteration on the transition kernel),
// compared in total variation with the empirical occupation law.
TEST(QueueWindow, StationaryLawMatchesLinearSolve) {
    QueueChainParams params{1.0, 2.0};
    const int cap = 200;
    const double p = params.up_prob();
    std::vector<double> eta(cap + 1, 1.0 / (cap + 1));
    for (int it = 0; it < 20000; ++it) {
        // lazy kernel (I + P)/2: the jump chain itself has period 2
        std::vector<double> next(cap + 1, 0.0);
        next[1] += eta[0];
        for (int k = 1; k <= cap; ++k) {
            if (k + 1 <= cap) next[k + 1] += eta[k] * p;
            next[k - 1] += eta[k] * (1.0 - p);
        }
        next[cap] += eta[cap] * p; // reflect truncation mass
        for (int k = 0; k <= cap; ++k) eta[k] = 0.5 * eta[k] + 0.5 * next[k];
    }

    // Occupation frequencies of N_n = N_0 - S_n.
    auto w = queue_window(params, 777, 1024);
    const long long n_steps = 2'000'000;
    ASSERT_TRUE(w.ensure_index(n_steps - 1));
    const long long n0 = *w.certified_past_sup();
    std::vector<double> freq(cap + 1, 0.0);
    for (long long n = 0; n < n_steps; ++n) {
        const long long state = n0 - w.sum(n);
        ASSERT_GE(state, 0);
        if (state <= cap) freq[static_cast<std::size_t>(state)] += 1.0;
    }
    for (auto& f : freq) f /= static_cast<double>(n_steps);

    double tv = 0.0;
    for (int k = 0; k <= cap; ++k) tv += std::abs(freq[k] - eta[k]);
    tv *= 0.5;
    EXPECT_LT(tv, 1e-3);
}

TEST(DeterministicWindow, CensorsOutsideRange) {
    auto w = deterministic_window({1, -1, 0, 2}, -2);
    EXPECT_EQ(w.lo(), -2);
    EXPECT_EQ(w.hi(), 2);
    EXPECT_FALSE(w.ensure_index(2));
    EXPECT_FALSE(w.ensure_index(-3));
    EXPECT_EQ(w.x(-2), 1);
    EXPECT_EQ(w.x(1), 2);
}

TEST(TrajectoryWindow, BudgetExhaustionSignals) {
    auto w = iid_window(bernoulli_pm1(0.5), 1, /*extension_budget=*/2);
    EXPECT_TRUE(w.ensure_index(TrajectoryWindow::kChunk - 1));
    EXPECT_TRUE(w.ensure_index(-1));
    EXPECT_FALSE(w.ensure_index(TrajectoryWindow::kChunk)); // budget gone
}
