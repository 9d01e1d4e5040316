#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "malvol/error.hpp"
#include "malvol/stats.hpp"

using namespace malvol;

TEST(Summarize, ConstantSample) {
    const std::vector<double> v{1, 1, 1};
    const auto s = summarize(v);
    EXPECT_EQ(s.mean, 1.0);
    EXPECT_EQ(*s.se, 0.0);
    EXPECT_EQ(s.ci95->first, 1.0);
    EXPECT_EQ(s.ci95->second, 1.0);
}

TEST(Summarize, TwoPoints) {
    const std::vector<double> v{0, 2};
    const auto s = summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 1.0);
    EXPECT_DOUBLE_EQ(*s.se, 1.0);
    EXPECT_DOUBLE_EQ(s.ci95->first, -0.96);
    EXPECT_DOUBLE_EQ(s.ci95->second, 2.96);
}

TEST(Summarize, SingleValueHasNoSe) {
    const std::vector<double> v{3.5};
    const auto s = summarize(v);
    EXPECT_EQ(s.mean, 3.5);
    EXPECT_FALSE(s.se.has_value());
    EXPECT_FALSE(s.ci95.has_value());
}

TEST(Summarize, EmptyThrows) {
    std::vector<double> v;
    try {
        summarize(v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyEnsemble);
    }
}

TEST(PairwiseSum, AlternatingCancelsExactly) {
    std::vector<double> v(1000000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 ? -1.0 : 1.0;
    EXPECT_EQ(mean(v), 0.0);
}

TEST(PairwiseSum, BeatsNaiveOnSmallIncrements) {
    std::vector<double> v(1 << 20, 0.1);
    v.insert(v.begin(), 1e8);
    const double exact = 1e8 + 0.1 * (1 << 20);
    EXPECT_NEAR(pairwise_sum(v), exact, 1e-6);
}

TEST(Variance, MatchesHandValue) {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_DOUBLE_EQ(sample_variance(v), 32.0 / 7.0);
}

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> v{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 2.5);
}

TEST(Ks, IdenticalAndDisjoint) {
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
    EXPECT_DOUBLE_EQ(ks_statistic(a, b), 1.0);
}

TEST(Trapezoid, ExactForLinear) {
    const std::vector<double> x{0.0, 0.3, 1.0, 2.5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    EXPECT_NEAR(trapezoid(x, y), 2.5 * 2.5 + 2.5, 1e-14);
    const auto w = trapezoid_weights(x);
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * y[i];
    EXPECT_NEAR(s, trapezoid(x, y), 1e-14);
}

TEST(Summarize, PermutationInvariantMean) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    std::vector<double> v(4097);
    for (double& x : v) x = nd(rng);
    const double m = mean(v);
    std::shuffle(v.begin(), v.end(), rng);
    EXPECT_NEAR(mean(v), m, 1e-15);
}
