#include "malvol/pricing.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "malvol/error.hpp"
#include "malvol/parallel.hpp"
#include "malvol/stats.hpp"

namespace malvol {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

ConditionalPrice bs_conditional(double sigma_bar, const Contract& c, double s0, double r, NormalCdf cdf) {
    if (!(sigma_bar >= 0.0) || !(s0 > 0.0) || !(c.strike >= 0.0) || !(c.maturity > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bs_conditional: need sigma_bar >= 0, s0 > 0, K >= 0, T > 0");
    }
    const double T = c.maturity;
    const double K = c.strike;
    const double forward = s0 * std::exp(r * T);
    double inner;
    if (K == 0.0) {
        inner = forward;
    } else if (sigma_bar == 0.0) {
        inner = std::max(forward - K, 0.0);
    } else {
        const double sd = sigma_bar * std::sqrt(T);
        const double d1 = (std::log(s0 / K) + (r + 0.5 * sigma_bar * sigma_bar) * T) / sd;
        inner = forward * cdf(d1) - K * cdf(d1 - sd);
    }
    return {inner, std::exp(-r * T) * inner};
}

std::string_view to_string(PriceMethod m) noexcept {
    switch (m) {
        case PriceMethod::DensityQuadrature: return "density_quadrature";
        case PriceMethod::MixingMc: return "mixing_mc";
        case PriceMethod::PlainMc: return "plain_mc";
        case PriceMethod::MartingaleCheck: return "martingale_check";
    }
    return "unknown";
}

namespace {

PriceEstimate make_estimate(PriceMethod m, double value, double se) {
    return {m, value, se, {value - 1.96 * se, value + 1.96 * se}, std::nullopt};
}

PriceEstimate from_summary(PriceMethod m, const Summary& s) {
    return make_estimate(m, s.mean, s.se.value_or(0.0));
}

// trapezoid weight times discounted conditional price at sigma = sqrt(x)
std::vector<double> quadrature_coefficients(const DensityEstimate& d, const Contract& c, double s0, double r) {
    if (d.x.size() < 21) {
        throw Error(ErrorCode::GridTooCoarse, "density grid needs at least 21 points for pricing");
    }
    const auto w = trapezoid_weights(d.x);
    std::vector<double> coeff(d.x.size());
    for (std::size_t j = 0; j < d.x.size(); ++j) {
        coeff[j] = w[j] * bs_conditional(std::sqrt(d.x[j]), c, s0, r).discounted;
    }
    return coeff;
}

void flag_mass(PriceEstimate& p, const DensityEstimate& d) {
    if (d.normalization < 0.9) {
        p.warning = "NegativeMassWarning: density mass " + std::to_string(d.normalization) + " < 0.9";
    }
}

}  // namespace

PriceEstimate price_mixing(std::span<const double> sigma_bar, const Contract& c, double s0, double r,
                           NormalCdf cdf) {
    if (sigma_bar.empty()) throw Error(ErrorCode::EmptyEnsemble, "price_mixing: no samples");
    std::vector<double> v(sigma_bar.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = bs_conditional(sigma_bar[i], c, s0, r, cdf).discounted;
    return from_summary(PriceMethod::MixingMc, summarize(v));
}

PriceEstimate price_from_density(const DensityEstimate& d, const Contract& c, double s0, double r) {
    const auto coeff = quadrature_coefficients(d, c, s0, r);
    double value = 0.0, var = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
        value += coeff[j] * d.p_hat[j];
        const double se = j < d.se.size() && std::isfinite(d.se[j]) ? d.se[j] : 0.0;
        var += coeff[j] * coeff[j] * se * se;
    }
    auto p = make_estimate(PriceMethod::DensityQuadrature, value, std::sqrt(var));
    flag_mass(p, d);
    return p;
}

PriceEstimate price_from_density(const DensityEstimate& d, std::span<const double> F,
                                 std::span<const double> w, const Contract& c, double s0, double r) {
    const auto coeff = quadrature_coefficients(d, c, s0, r);
    auto p = from_summary(PriceMethod::DensityQuadrature, density_functional(d.x, coeff, F, w, d.pivot));
    flag_mass(p, d);
    return p;
}

namespace {

PlainMcResult summarize_terminal(std::span<const double> s_T, const Contract& c, double r,
                                 std::size_t failures) {
    const double disc = std::exp(-r * c.maturity);
    std::vector<double> payoff(s_T.size()), asset(s_T.size());
    for (std::size_t i = 0; i < s_T.size(); ++i) {
        payoff[i] = disc * std::max(s_T[i] - c.strike, 0.0);
        asset[i] = disc * s_T[i];
    }
    PlainMcResult out;
    out.price = from_summary(PriceMethod::PlainMc, summarize(payoff));
    out.martingale = from_summary(PriceMethod::MartingaleCheck, summarize(asset));
    out.failures = failures;
    return out;
}

double terminal_asset(double s0, double r, double T, double var, double xi) {
    return s0 * std::exp(r * T - 0.5 * var * T + std::sqrt(var * T) * xi);
}

template <class Model, class Simulate>
PlainMcResult plain_mc(const Model& model, const Contract& c, const TimeGrid& grid,
                       const EnsembleOptions& opts, Simulate simulate) {
    if (opts.n_paths == 0) throw Error(ErrorCode::EmptyEnsemble, "price_plain_mc: no paths");
    const double s0 = model.params().s0;
    const double r = model.params().r;
    std::vector<std::optional<double>> slots(opts.n_paths);
    parallel_for(opts.n_paths, opts.threads, [&](std::size_t p) {
        try {
            const auto path = simulate(model, grid, volatility_stream(opts, p));
            slots[p] = sample_terminal_asset(path, s0, r, asset_stream(opts, p));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::FloorSaturation) throw;
        }
    });
    std::vector<double> s_T;
    s_T.reserve(slots.size());
    std::size_t failures = 0;
    for (const auto& v : slots) {
        if (v) s_T.push_back(*v);
        else ++failures;
    }
    if (failures > failure_budget(opts.n_paths)) {
        throw Error(ErrorCode::FailureBudgetExceeded, std::to_string(failures) + " paths hit the variance floor");
    }
    return summarize_terminal(s_T, c, r, failures);
}

}  // namespace

PlainMcResult price_plain_mc(std::span<const double> avg_variance, const Contract& c, double s0,
                             double r, const EnsembleOptions& opts) {
    if (avg_variance.empty()) throw Error(ErrorCode::EmptyEnsemble, "price_plain_mc: no samples");
    std::vector<double> s_T(avg_variance.size());
    for (std::size_t i = 0; i < s_T.size(); ++i) {
        s_T[i] = terminal_asset(s0, r, c.maturity, avg_variance[i], asset_stream(opts, i).normal(0));
    }
    return summarize_terminal(s_T, c, r, 0);
}

PlainMcResult price_plain_mc(const ValidatedOUModel& model, const Contract& c, const TimeGrid& grid,
                             const EnsembleOptions& opts) {
    return plain_mc(model, c, grid, opts, [](const ValidatedOUModel& m, const TimeGrid& g, const NoiseStream& s) {
        return simulate_ou_path(m, g, s);
    });
}

PlainMcResult price_plain_mc(const ValidatedCIRModel& model, const Contract& c, const TimeGrid& grid,
                             const EnsembleOptions& opts) {
    return plain_mc(model, c, grid, opts, [](const ValidatedCIRModel& m, const TimeGrid& g, const NoiseStream& s) {
        return simulate_cir_path(m, g, s);
    });
}

}  // namespace malvol
