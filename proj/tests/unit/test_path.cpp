#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "malvol/ensemble.hpp"
#include "malvol/error.hpp"
#include "malvol/path.hpp"
#include "malvol/stats.hpp"

using namespace malvol;
using namespace malvol::test;

namespace {

// SE of the sample variance from the fourth central moment
double variance_se(const std::vector<double>& v) {
    const double m = mean(v);
    const double s2 = sample_variance(v);
    std::vector<double> d4(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d4[i] = std::pow(v[i] - m, 4);
    const double m4 = mean(d4);
    return std::sqrt((m4 - s2 * s2) / static_cast<double>(v.size()));
}

}  // namespace

TEST(Grid, Examples) {
    const auto g = make_grid(1.0, 4);
    const auto t = g.nodes();
    ASSERT_EQ(t.size(), 5u);
    const double want[] = {0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(t[i], want[i]);
    EXPECT_EQ(t.back(), 1.0);
    EXPECT_DOUBLE_EQ(make_grid(2.0, 2).dt, 1.0);
    EXPECT_THROW(make_grid(1.0, 1), Error);
    EXPECT_THROW(make_grid(0.0, 8), Error);
}

TEST(Grid, WeightsSumToT) {
    const auto g = make_grid(3.0, 7);
    const auto w = g.weights();
    double s = 0;
    for (double x : w) s += x;
    EXPECT_NEAR(s, 3.0, 1e-14);
    EXPECT_DOUBLE_EQ(w.front(), g.dt / 2);
}

TEST(OuPath, ZeroNoiseDecaysDeterministically) {
    auto p = ref_ou();
    p.k_ou = 0;
    p.y0 = 1.5;
    p.alpha = 2.0;
    const auto g = make_grid(1.0, 64);
    const auto path = simulate_ou_path(p, ref_vol(), g, normals(1, 0, 64));
    for (std::size_t i = 0; i <= 64; ++i)
        EXPECT_NEAR(path.states[i], 1.5 * std::exp(-2.0 * g.time(i)), 1e-14);
}

TEST(OuPath, TerminalMoments) {
    auto p = ref_ou();
    p.y0 = 0.7;
    const auto model = ou_model(p);
    const auto g = make_grid(1.0, 16);
    EnsembleOptions o{100000, 99, false, 0};
    const auto y = simulate_terminal_states(model, g, o);
    const auto s = summarize(y);
    EXPECT_LT(std::abs(s.mean - 0.7 * std::exp(-1.0)), 3 * *s.se);
    const double var = 0.25 / 2 * (1 - std::exp(-2.0));
    EXPECT_LT(std::abs(sample_variance(y) - var), 3 * variance_se(y));
}

TEST(OuPath, ExactTransitionIndependentOfStepCount) {
    const auto model = ou_model();
    EnsembleOptions a{20000, 1, false, 0}, b{20000, 2, false, 0};
    const auto y16 = simulate_terminal_states(model, make_grid(1.0, 16), a);
    const auto y512 = simulate_terminal_states(model, make_grid(1.0, 512), b);
    // two-sample KS critical value at 1%
    const double crit = 1.628 * std::sqrt(2.0 / 20000);
    EXPECT_LT(ks_statistic(y16, y512), crit);
}

TEST(OuPath, AverageVarianceBoundedBelow) {
    const auto model = ou_model();
    const auto g = make_grid(1.0, 128);
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto path = simulate_ou_path(model, g, NoiseStream(5, i, StreamPurpose::Volatility));
        EXPECT_GE(path.avg_variance, 0.01);
        for (double y : path.states) EXPECT_GT(model.vol().sigma_prime(y), 0.0);
    }
}

TEST(CirPath, ZeroNoiseSolvesOde) {
    CIRParams p{1.0, 0.0, 0.2, 100, 0.05, 0.05, 1.0};
    const auto g = make_grid(1.0, 4096);
    const auto path = simulate_cir_path(p, g, normals(1, 0, 4096));
    for (std::size_t i = 0; i <= 4096; i += 64) {
        const double exact = 1.0 + (0.2 - 1.0) * std::exp(-g.time(i));
        EXPECT_LT(std::abs(path.states[i] - exact) / exact, 1e-3);
    }
}

TEST(CirPath, TerminalMoments) {
    auto p = ref_cir();
    p.z0 = 0.5;
    const auto model = cir_model(p);
    EnsembleOptions o{100000, 17, false, 0};
    const auto z = simulate_terminal_states(model, make_grid(1.0, 512), o);
    const auto s = summarize(z);
    const double e1 = std::exp(-1.0), e2 = std::exp(-2.0), k2 = 0.0625;
    EXPECT_LT(std::abs(s.mean - (0.5 * e1 + (1 - e1))), 3 * *s.se);
    const double var = 0.5 * k2 * (e1 - e2) + 0.5 * k2 * (1 - e1) * (1 - e1);
    EXPECT_LT(std::abs(sample_variance(z) - var), 3 * variance_se(z));
}

TEST(CirPath, NoFlooringInDensityRegime) {
    const auto model = cir_model();
    const auto g = make_grid(1.0, 512);
    std::size_t floored = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const auto path = simulate_cir_path(model, g, NoiseStream(3, i, StreamPurpose::Volatility));
        floored += path.floored_steps;
        if (i % 500 == 0) {
            EXPECT_TRUE(std::is_sorted(path.recip_integral.begin(), path.recip_integral.end()));
            for (double z : path.states) EXPECT_GT(z, 0.0);
        }
    }
    EXPECT_EQ(floored, 0u);
}

TEST(CirPath, CoarseGridSaturatesFloor) {
    CIRParams p{0.01, 0.1, 1.0, 100, 0.0, 0.0, 10.0};
    try {
        simulate_cir_path(p, make_grid(10.0, 2), normals(1, 0, 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FloorSaturation);
    }
}

// matched noise: coarse normal = sum of the fine normals in its step / sqrt(ratio)
TEST(Path, AverageVarianceConvergesUnderRefinement) {
    const std::size_t fine = 4096, coarse = 512, ratio = fine / coarse;
    const auto gf = make_grid(1.0, fine), gc = make_grid(1.0, coarse);
    double ou_diff = 0, cir_diff = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto zf = normals(8, k, fine);
        std::vector<double> zc(coarse, 0.0);
        for (std::size_t i = 0; i < fine; ++i) zc[i / ratio] += zf[i];
        for (double& z : zc) z /= std::sqrt(static_cast<double>(ratio));
        ou_diff += std::abs(simulate_ou_path(ref_ou(), ref_vol(), gf, zf).avg_variance -
                            simulate_ou_path(ref_ou(), ref_vol(), gc, zc).avg_variance);
        cir_diff += std::abs(simulate_cir_path(ref_cir(), gf, zf).avg_variance -
                             simulate_cir_path(ref_cir(), gc, zc).avg_variance);
    }
    EXPECT_LT(ou_diff / 100, 5e-3);
    EXPECT_LT(cir_diff / 100, 5e-3);
}

TEST(ItoPrefix, ConstantIntegrands) {
    const auto g = make_grid(1.0, 32);
    const auto path = simulate_ou_path(ref_ou(), ref_vol(), g, normals(2, 0, 32));
    const auto zero = ito_prefix_sums(path, std::vector<double>(33, 0.0));
    for (double v : zero) EXPECT_EQ(v, 0.0);
    const auto w = ito_prefix_sums(path, std::vector<double>(33, 1.0));
    double running = 0;
    EXPECT_EQ(w[0], 0.0);
    for (std::size_t j = 0; j < 32; ++j) {
        running += path.dW_tilde[j];
        EXPECT_NEAR(w[j + 1], running, 1e-14);
    }
    EXPECT_THROW(ito_prefix_sums(path, std::vector<double>(32, 1.0)), Error);
}

TEST(ItoPrefix, Linear) {
    const auto g = make_grid(1.0, 16);
    const auto path = simulate_ou_path(ref_ou(), ref_vol(), g, normals(2, 1, 16));
    std::vector<double> f(17), h(17), comb(17);
    for (std::size_t i = 0; i < 17; ++i) {
        f[i] = 0.5 * i;  // exact binary fractions keep the identity exact
        h[i] = i % 3;
        comb[i] = 2 * f[i] + h[i];
    }
    const auto pf = ito_prefix_sums(path, f), ph = ito_prefix_sums(path, h);
    const auto pc = ito_prefix_sums(path, comb);
    for (std::size_t j = 0; j < 17; ++j) EXPECT_NEAR(pc[j], 2 * pf[j] + ph[j], 1e-14);
}

TEST(ItoPrefix, IsometryExpWeight) {
    const std::size_t n = 256, N = 100000;
    const auto g = make_grid(1.0, n);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = std::exp(g.time(i));
    std::vector<double> last(N), dw(n);
    for (std::size_t k = 0; k < N; ++k) {
        NoiseStream(4, k, StreamPurpose::Volatility).fill_normals(dw);
        for (double& x : dw) x *= std::sqrt(g.dt);
        last[k] = ito_prefix_sums(dw, f).back();
    }
    const auto s = summarize(last);
    EXPECT_LT(std::abs(s.mean), 3 * *s.se);
    // the left-point sum has variance sum e^{2 t_i} dt exactly
    double disc = 0;
    for (std::size_t i = 0; i < n; ++i) disc += f[i] * f[i] * g.dt;
    EXPECT_NEAR(disc, 3.1945, 0.02);
    EXPECT_LT(std::abs(sample_variance(last) - disc), 3 * variance_se(last));
}

TEST(TerminalAsset, Examples) {
    PathBundle p;
    p.grid = make_grid(1.0, 4);
    p.avg_variance = 0.0;
    EXPECT_DOUBLE_EQ(sample_terminal_asset(p, 100, 0.05, 2.3), 100 * std::exp(0.05));
    p.avg_variance = 0.04;
    EXPECT_DOUBLE_EQ(sample_terminal_asset(p, 100, 0.05, 0.0), 100 * std::exp(0.05 - 0.02));
    EXPECT_DOUBLE_EQ(sample_terminal_asset(p, 100, 0.05, 1.0), 100 * std::exp(0.05 - 0.02 + 0.2));
}
