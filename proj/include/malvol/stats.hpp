#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace malvol {

/// Pairwise (tree) summation with a fixed split rule: the result depends only
/// on the values and their order, never on how they were produced.
double pairwise_sum(std::span<const double> values) noexcept;

double mean(std::span<const double> values);

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> std_dev;  ///< sample std (n-1); absent for n == 1
    std::optional<double> se;       ///< std_dev / sqrt(n)
    std::optional<std::pair<double, double>> ci95;
};

/// Mean, standard error and mean +- 1.96 se. Throws EmptyEnsemble on empty input.
Summary summarize(std::span<const double> values);

/// Sample variance (n-1 denominator), two-pass with pairwise sums.
double sample_variance(std::span<const double> values);

/// Linear-interpolated empirical quantile, p in [0, 1].
double quantile(std::span<const double> values, double p);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Trapezoid rule over an arbitrary (sorted) abscissa.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Trapezoid weights for the abscissa x (same length as x).
std::vector<double> trapezoid_weights(std::span<const double> x);

}  // namespace malvol
