#pragma once
// Density of the averaged variance F from (F_i, delta_i) samples:
//
//   p(x) = E[1{F > x} delta]
//
// Since E[delta] = 0, any constant may be subtracted from the indicator. The
// default estimator subtracts 1{x < pivot} with the pivot at the sample
// median, so each x only sees the thinner tail of F. Set centering = false to
// get the plain average.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "malvol/ensemble.hpp"
#include "malvol/stats.hpp"

namespace malvol {

enum class DensityMethod { Malliavin, Kde };

struct DensityEstimate {
    std::vector<double> x;
    std::vector<double> p_hat;
    std::vector<double> se;      ///< NaN where undefined (single sample)
    double normalization = 0.0;  ///< trapezoid mass over x
    DensityMethod method = DensityMethod::Malliavin;
    std::optional<double> pivot;  ///< Malliavin estimator with centering
};

/// Malliavin-weight estimate. Throws EmptyEnsemble, LengthMismatch,
/// InvalidArgument for negative x.
DensityEstimate estimate_density(std::span<const double> x_grid, std::span<const double> avg_variance,
                                 std::span<const double> weights, bool centering = true);

DensityEstimate estimate_density_ou(std::span<const double> x_grid, const EnsembleResult& ensemble,
                                    bool centering = true);
DensityEstimate estimate_density_cir(std::span<const double> x_grid, const EnsembleResult& ensemble,
                                     bool centering = true);

/// Mean and SE of sum_j coeff_j p_hat(x_j), computed per sample so the SE
/// accounts for the correlation between grid points.
Summary density_functional(std::span<const double> x_grid, std::span<const double> coeff,
                           std::span<const double> avg_variance, std::span<const double> weights,
                           std::optional<double> pivot);

/// Gaussian KDE, Silverman bandwidth 1.06 sd N^{-1/5}, SE from 10 contiguous
/// blocks. With zero sample spread the bandwidth falls back to the smallest
/// grid spacing. Throws TooFewSamples below 100 samples.
DensityEstimate kde_density(std::span<const double> samples, std::span<const double> x_grid);

double silverman_bandwidth(std::span<const double> samples);

std::vector<double> linear_grid(double lo, double hi, std::size_t points);

/// Default density grid: max(lower_support, 0.5 * P1) .. 1.2 * P99.
/// With cover_max the upper end is raised to the sample maximum when that is
/// larger, so the estimate vanishes beyond the grid (used for pricing).
std::vector<double> auto_density_grid(std::span<const double> avg_variance, double lower_support,
                                      std::size_t points = 41, bool cover_max = false);

}  // namespace malvol
