#pragma once
// European call pricing under the minimal martingale measure.
//
// Conditionally on the volatility path the asset is lognormal with variance
// sigma_bar^2 T, so the price is the Black-Scholes value at sigma_bar averaged
// over paths (mixing), or the same integrand against the density of
// sigma_bar^2 (quadrature), or a direct simulation of S_T.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "malvol/density.hpp"
#include "malvol/ensemble.hpp"
#include "malvol/model.hpp"
#include "malvol/path.hpp"

namespace malvol {

using NormalCdf = double (*)(double);

/// Phi(x) = erfc(-x / sqrt 2) / 2.
double normal_cdf(double x) noexcept;

struct ConditionalPrice {
    double inner = 0.0;       ///< s0 e^{rT} Phi(d1) - K Phi(d2)
    double discounted = 0.0;  ///< e^{-rT} inner
};

/// Black-Scholes with volatility sigma_bar over [0, contract.maturity].
/// sigma_bar = 0 and K = 0 use the limiting values.
ConditionalPrice bs_conditional(double sigma_bar, const Contract& contract, double s0, double r,
                                NormalCdf cdf = normal_cdf);

enum class PriceMethod { DensityQuadrature, MixingMc, PlainMc, MartingaleCheck };

std::string_view to_string(PriceMethod m) noexcept;

struct PriceEstimate {
    PriceMethod method = PriceMethod::MixingMc;
    double value = 0.0;
    double std_error = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    std::optional<std::string> warning;
};

PriceEstimate price_mixing(std::span<const double> sigma_bar, const Contract& contract, double s0,
                           double r, NormalCdf cdf = normal_cdf);

/// Quadrature against a density estimate. The SE treats grid-point errors
/// as independent. Throws GridTooCoarse below 21 points.
PriceEstimate price_from_density(const DensityEstimate& density, const Contract& contract,
                                 double s0, double r);

/// Same quadrature, SE computed per sample from the ensemble behind the estimate.
PriceEstimate price_from_density(const DensityEstimate& density, std::span<const double> avg_variance,
                                 std::span<const double> weights, const Contract& contract,
                                 double s0, double r);

struct PlainMcResult {
    PriceEstimate price;
    PriceEstimate martingale;  ///< mean of e^{-rT} S_T
    std::size_t failures = 0;
};

/// Simulates volatility paths and one terminal asset draw per path.
PlainMcResult price_plain_mc(const ValidatedOUModel& model, const Contract& contract,
                             const TimeGrid& grid, const EnsembleOptions& opts);
PlainMcResult price_plain_mc(const ValidatedCIRModel& model, const Contract& contract,
                             const TimeGrid& grid, const EnsembleOptions& opts);

/// Plain MC from precomputed averaged variances; asset draws come from asset_stream(opts, i).
PlainMcResult price_plain_mc(std::span<const double> avg_variance, const Contract& contract,
                             double s0, double r, const EnsembleOptions& opts);

}  // namespace malvol
