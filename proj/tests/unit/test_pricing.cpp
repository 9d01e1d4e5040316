#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "malvol/commands.hpp"
#include "malvol/config.hpp"
#include "malvol/density.hpp"
#include "malvol/error.hpp"
#include "malvol/pricing.hpp"
#include "malvol/stats.hpp"

using namespace malvol;
using namespace malvol::test;

namespace {

const Contract kAtm{100.0, 1.0};

bool overlap(const PriceEstimate& a, const PriceEstimate& b) {
    return a.ci95.first <= b.ci95.second && b.ci95.first <= a.ci95.second;
}

}  // namespace

TEST(BlackScholes, Examples) {
    EXPECT_NEAR(bs_conditional(0.2, kAtm, 100, 0.05).discounted, 10.450583572185565, 1e-12);
    EXPECT_NEAR(bs_conditional(0.0, kAtm, 100, 0.05).discounted, 100 - 100 * std::exp(-0.05), 1e-12);
    EXPECT_NEAR(bs_conditional(0.0, kAtm, 100, 0.05).discounted, 4.877057549928594, 1e-12);
    const auto zero_strike = bs_conditional(0.3, {0.0, 1.0}, 100, 0.05);
    EXPECT_DOUBLE_EQ(zero_strike.discounted, 100.0);
    EXPECT_DOUBLE_EQ(zero_strike.inner, 100 * std::exp(0.05));
}

TEST(BlackScholes, ParityAcrossStrikes) {
    // call - put = s0 - K e^{-rT}; put from the same formula by symmetry of d1, d2
    for (double K : {60.0, 90.0, 100.0, 130.0}) {
        const double s = 0.35, r = 0.03;
        const double d1 = (std::log(100 / K) + (r + 0.5 * s * s)) / s, d2 = d1 - s;
        const double put = K * std::exp(-r) * normal_cdf(-d2) - 100 * normal_cdf(-d1);
        const double call = bs_conditional(s, {K, 1.0}, 100, r).discounted;
        EXPECT_NEAR(call - put, 100 - K * std::exp(-r), 1e-11);
    }
}

TEST(BlackScholes, MonotoneAndBounded) {
    double prev = bs_conditional(0.0, kAtm, 100, 0.05).discounted;
    const double lower = 100 - 100 * std::exp(-0.05);
    for (int i = 1; i <= 100; ++i) {
        const double p = bs_conditional(0.02 * i, kAtm, 100, 0.05).discounted;
        EXPECT_GT(p, prev);
        EXPECT_GE(p, lower);
        EXPECT_LE(p, 100.0);
        prev = p;
    }
}

TEST(BlackScholes, CdfAccuracy) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
    EXPECT_NEAR(normal_cdf(-8.0), 6.220960574271784e-16, 1e-28);
}

TEST(Mixing, ConstantSampleIsExact) {
    const std::vector<double> s(50000, 0.2);
    const auto p = price_mixing(s, kAtm, 100, 0.05);
    EXPECT_NEAR(p.value, 10.450583572185565, 1e-9);
    EXPECT_EQ(p.std_error, 0.0);
    EXPECT_EQ(p.method, PriceMethod::MixingMc);
}

TEST(Mixing, DeepOutOfTheMoney) {
    const std::vector<double> s{0.1, 0.2, 0.4, 0.8};
    const auto p = price_mixing(s, {1e6, 1.0}, 100, 0.05);
    EXPECT_LT(p.value, 1e-3);
    EXPECT_GE(p.value, 0.0);
    EXPECT_THROW(price_mixing(std::vector<double>{}, kAtm, 100, 0.05), Error);
}

TEST(Quadrature, PointMass) {
    const auto xs = linear_grid(0.0, 0.08, 41);  // 0.04 is node 20
    DensityEstimate d;
    d.x = xs;
    d.p_hat.assign(xs.size(), 0.0);
    d.se.assign(xs.size(), 0.0);
    d.p_hat[20] = 1.0 / (xs[1] - xs[0]);
    d.normalization = trapezoid(d.x, d.p_hat);
    const auto p = price_from_density(d, kAtm, 100, 0.05);
    EXPECT_NEAR(p.value, bs_conditional(0.2, kAtm, 100, 0.05).discounted, 1e-6);
    EXPECT_EQ(p.std_error, 0.0);
    EXPECT_FALSE(p.warning.has_value());
}

TEST(Quadrature, ErrorsAndWarnings) {
    DensityEstimate d;
    d.x = linear_grid(0.0, 0.08, 20);
    d.p_hat.assign(20, 1.0);
    d.se.assign(20, 0.0);
    EXPECT_THROW(price_from_density(d, kAtm, 100, 0.05), Error);

    d.x = linear_grid(0.0, 0.08, 21);
    d.p_hat.assign(21, 1.0);
    d.se.assign(21, 0.0);
    d.normalization = trapezoid(d.x, d.p_hat);
    const auto p = price_from_density(d, kAtm, 100, 0.05);
    ASSERT_TRUE(p.warning.has_value());
    EXPECT_NE(p.warning->find("NegativeMassWarning"), std::string::npos);
}

TEST(PlainMc, DeterministicVolatility) {
    // k = 0: sigma(y0 e^{-t}) is deterministic; sigma_bar^2 from Simpson on 20000 panels
    auto p = ref_ou();
    p.k_ou = 0;
    p.y0 = 0.5;
    const auto vol = ref_vol();
    const std::size_t m = 20000;
    double simpson = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double s = vol.sigma(0.5 * std::exp(-static_cast<double>(i) / m));
        const double c = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
        simpson += c * s * s;
    }
    simpson /= 3.0 * m;

    const auto g = make_grid(1.0, 256);
    const auto path = simulate_ou_path(p, vol, g, normals(1, 0, 256));
    EXPECT_NEAR(path.avg_variance, simpson, 1e-6);

    const double oracle = bs_conditional(std::sqrt(simpson), kAtm, 100, 0.05).discounted;
    const std::vector<double> var(100000, path.avg_variance);
    EnsembleOptions o{100000, 21, false, 0};
    const auto mc = price_plain_mc(var, kAtm, 100, 0.05, o);
    EXPECT_LT(std::abs(mc.price.value - oracle), 3 * mc.price.std_error);
    EXPECT_LT(std::abs(mc.martingale.value - 100), 3 * mc.martingale.std_error);

    const std::vector<double> sig(10, std::sqrt(path.avg_variance));
    EXPECT_NEAR(price_mixing(sig, kAtm, 100, 0.05).value, oracle, 1e-5);
}

TEST(PlainMc, MartingaleAndZeroStrike) {
    EnsembleOptions o{100000, 31, false, 0};
    const auto g = make_grid(1.0, 64);
    const auto ou = price_plain_mc(ou_model(), {0.0, 1.0}, g, o);
    EXPECT_LT(std::abs(ou.martingale.value - 100), 3 * ou.martingale.std_error);
    EXPECT_LT(std::abs(ou.price.value - 100), 3 * ou.price.std_error);
    EXPECT_EQ(ou.failures, 0u);
    const auto cir = price_plain_mc(cir_model(), {0.0, 1.0}, g, o);
    EXPECT_LT(std::abs(cir.martingale.value - 100), 3 * cir.martingale.std_error);
    EXPECT_LT(std::abs(cir.price.value - 100), 3 * cir.price.std_error);
}

TEST(PriceEstimate, IntervalsContainValue) {
    EnsembleOptions o{2000, 1, false, 0};
    const auto r = price_plain_mc(ou_model(), kAtm, make_grid(1.0, 64), o);
    for (const auto& p : {r.price, r.martingale}) {
        EXPECT_GE(p.value, 0.0);
        EXPECT_LE(p.ci95.first, p.value);
        EXPECT_GE(p.ci95.second, p.value);
        EXPECT_NEAR(p.ci95.second - p.value, 1.96 * p.std_error, 1e-12);
    }
}

class MethodTriangle : public ::testing::TestWithParam<ModelTag> {};

TEST_P(MethodTriangle, ThreePricersAgree) {
    const auto cfg = GetParam() == ModelTag::OU ? reference_ou_config() : reference_cir_config();
    const auto run = run_price(cfg, 0);
    ASSERT_EQ(run.rows.size(), 4u);
    const auto& dq = run.rows[0];
    const auto& mix = run.rows[1];
    const auto& plain = run.rows[2];
    EXPECT_EQ(dq.method, PriceMethod::DensityQuadrature);
    EXPECT_EQ(run.rows[3].method, PriceMethod::MartingaleCheck);
    EXPECT_TRUE(overlap(dq, mix));
    EXPECT_TRUE(overlap(dq, plain));
    EXPECT_TRUE(overlap(mix, plain));
    EXPECT_LT(std::abs(dq.value - mix.value), 2 * (dq.std_error + mix.std_error));
    EXPECT_LT(std::abs(dq.value - plain.value), 2 * (dq.std_error + plain.std_error));
    EXPECT_LT(std::abs(mix.value - plain.value), 2 * (mix.std_error + plain.std_error));
    EXPECT_LT(std::abs(dq.value - mix.value), 0.02 * mix.value);
    EXPECT_LT(std::abs(run.rows[3].value - 100), 3 * run.rows[3].std_error);
}

// refining the quadrature grid moves the price by less than half its SE
TEST_P(MethodTriangle, QuadratureGridConvergence) {
    auto cfg = GetParam() == ModelTag::OU ? reference_ou_config() : reference_cir_config();
    const double lower = GetParam() == ModelTag::OU ? 0.01 : 0.0;
    EnsembleResult e = GetParam() == ModelTag::OU
                           ? run_ensemble(ou_model(), make_grid(1.0, 256), cfg.ensemble)
                           : run_ensemble(cir_model(), make_grid(1.0, 256), cfg.ensemble);
    const auto F = e.avg_variances();
    const auto d = e.weights();
    const auto x41 = auto_density_grid(F, lower, 41, true);
    const auto x81 = auto_density_grid(F, lower, 81, true);
    const auto p41 = price_from_density(estimate_density(x41, F, d), F, d, cfg.contract(), cfg.s0(), cfg.r());
    const auto p81 = price_from_density(estimate_density(x81, F, d), F, d, cfg.contract(), cfg.s0(), cfg.r());
    EXPECT_LT(std::abs(p41.value - p81.value), 0.5 * p41.std_error)
        << p41.value << " vs " << p81.value << " se " << p41.std_error;
}

INSTANTIATE_TEST_SUITE_P(Models, MethodTriangle, ::testing::Values(ModelTag::OU, ModelTag::CIR),
                         [](const auto& info) { return info.param == ModelTag::OU ? "OU" : "CIR"; });
