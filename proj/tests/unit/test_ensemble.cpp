#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "helpers.hpp"
#include "malvol/ensemble.hpp"
#include "malvol/error.hpp"
#include "malvol/malliavin_ou.hpp"
#include "malvol/stats.hpp"

using namespace malvol;
using namespace malvol::test;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_identical(const EnsembleResult& a, const EnsembleResult& b) {
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].path_index, b.samples[i].path_index);
        EXPECT_TRUE(bit_equal(a.samples[i].avg_variance, b.samples[i].avg_variance));
        EXPECT_TRUE(bit_equal(a.samples[i].weight, b.samples[i].weight));
        EXPECT_TRUE(bit_equal(a.samples[i].denominator, b.samples[i].denominator));
    }
}

}  // namespace

TEST(Ensemble, SinglePath) {
    EnsembleOptions o{1, 3, false, 1};
    const auto e = run_ensemble(ou_model(), make_grid(1.0, 64), o);
    ASSERT_EQ(e.samples.size(), 1u);
    EXPECT_EQ(e.n_paths, 1u);
    EXPECT_FALSE(summarize(e.weights()).se.has_value());
}

TEST(Ensemble, EmptyRejected) {
    EnsembleOptions o{0, 3, false, 1};
    EXPECT_THROW(run_ensemble(ou_model(), make_grid(1.0, 8), o), Error);
}

TEST(Ensemble, ThreadCountDoesNotChangeSamples) {
    const auto g = make_grid(1.0, 128);
    EnsembleOptions one{3001, 77, false, 1}, eight{3001, 77, false, 8};
    expect_identical(run_ensemble(ou_model(), g, one), run_ensemble(ou_model(), g, eight));
    expect_identical(run_ensemble(cir_model(), g, one), run_ensemble(cir_model(), g, eight));
}

TEST(Ensemble, RerunIsBitIdentical) {
    EnsembleOptions o{500, 5, false, 3};
    const auto g = make_grid(1.0, 64);
    expect_identical(run_ensemble(cir_model(), g, o), run_ensemble(cir_model(), g, o));
}

TEST(Ensemble, SeedChangesSamples) {
    const auto g = make_grid(1.0, 64);
    EnsembleOptions a{10, 5, false, 1}, b{10, 6, false, 1};
    EXPECT_NE(run_ensemble(ou_model(), g, a).samples[0].weight, run_ensemble(ou_model(), g, b).samples[0].weight);
}

TEST(Ensemble, SamplesMatchSinglePathRuns) {
    const auto model = ou_model();
    const auto g = make_grid(1.0, 64);
    EnsembleOptions o{20, 9, false, 2};
    const auto e = run_ensemble(model, g, o);
    for (std::size_t i = 0; i < 20; ++i) {
        const auto path = simulate_ou_path(model, g, volatility_stream(o, i));
        const auto w = ou_weight(path, model);
        EXPECT_TRUE(bit_equal(e.samples[i].weight, w.delta_bar));
        EXPECT_TRUE(bit_equal(e.samples[i].avg_variance, path.avg_variance));
    }
}

TEST(Ensemble, FailureBudget) {
    EXPECT_EQ(failure_budget(50000), 50u);
    EXPECT_EQ(failure_budget(999), 0u);
    EXPECT_EQ(failure_budget(1000), 1u);

    // coarse steps overshoot below zero on nearly every path
    CIRParams p{1.0, 1.4, 0.01, 100, 0.05, 0.05, 10.0};
    const auto model = *validate_cir(p, false).model;
    EnsembleOptions o{200, 1, false, 1};
    try {
        run_ensemble(model, make_grid(10.0, 2), o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FailureBudgetExceeded);
    }
}

TEST(Ensemble, Antithetic) {
    EnsembleOptions o{10, 4, true, 1};
    for (std::size_t m = 0; m < 5; ++m) {
        const auto a = volatility_stream(o, 2 * m), b = volatility_stream(o, 2 * m + 1);
        for (std::uint64_t i = 0; i < 8; ++i) EXPECT_EQ(a.normal(i), -b.normal(i));
        EXPECT_EQ(asset_stream(o, 2 * m).normal(0), -asset_stream(o, 2 * m + 1).normal(0));
    }
    // y0 = 0 and paired noise: Y paths mirror each other
    const auto g = make_grid(1.0, 32);
    const auto p0 = simulate_ou_path(ou_model(), g, volatility_stream(o, 0));
    const auto p1 = simulate_ou_path(ou_model(), g, volatility_stream(o, 1));
    for (std::size_t i = 0; i <= 32; ++i) EXPECT_EQ(p0.states[i], -p1.states[i]);

    EnsembleOptions off{10, 4, false, 1};
    EXPECT_NE(volatility_stream(off, 0).normal(0), -volatility_stream(off, 1).normal(0));
}

TEST(Ensemble, AntitheticWeightsStillCentred) {
    EnsembleOptions o{20000, 8, true, 0};
    const auto e = run_ensemble(ou_model(), make_grid(1.0, 128), o);
    const auto w = e.weights();
    // pairs are dependent: SE from pair means
    std::vector<double> pairs(w.size() / 2);
    for (std::size_t m = 0; m < pairs.size(); ++m) pairs[m] = 0.5 * (w[2 * m] + w[2 * m + 1]);
    const auto s = summarize(pairs);
    EXPECT_LT(std::abs(s.mean), 3 * *s.se);
}

TEST(Ensemble, WinsorizeOption) {
    EnsembleOptions o{2000, 8, false, 1};
    const auto g = make_grid(1.0, 64);
    const auto raw = run_ensemble(ou_model(), g, o).weights();
    o.winsorize = true;
    o.winsorize_quantile = 0.01;
    const auto w = run_ensemble(ou_model(), g, o).weights();
    const double lo = quantile(raw, 0.01), hi = quantile(raw, 0.99);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w[i], std::clamp(raw[i], lo, hi));
}

TEST(Winsorize, Clamps) {
    std::vector<double> v;
    for (int i = 0; i <= 100; ++i) v.push_back(i);
    winsorize(v, 0.05);
    EXPECT_EQ(v.front(), 5.0);
    EXPECT_EQ(v.back(), 95.0);
    EXPECT_EQ(v[50], 50.0);
    EXPECT_THROW(winsorize(v, 0.5), Error);
}

TEST(Ensemble, TerminalStatesThreadIndependent) {
    const auto g = make_grid(1.0, 32);
    EnsembleOptions one{1000, 2, false, 1}, four{1000, 2, false, 4};
    const auto a = simulate_terminal_states(cir_model(), g, one);
    const auto b = simulate_terminal_states(cir_model(), g, four);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(bit_equal(a[i], b[i]));
}
