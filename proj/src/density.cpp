#include "malvol/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "malvol/error.hpp"

namespace malvol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(std::span<const double> x_grid, std::span<const double> F,
                  std::span<const double> w) {
    if (F.empty()) throw Error(ErrorCode::EmptyEnsemble, "density: no samples");
    if (F.size() != w.size()) throw Error(ErrorCode::LengthMismatch, "density: samples and weights differ in length");
    for (double x : x_grid) {
        if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "density: x grid must be >= 0");
    }
}

}  // namespace

DensityEstimate estimate_density(std::span<const double> x_grid, std::span<const double> F,
                                 std::span<const double> w, bool centering) {
    check_inputs(x_grid, F, w);
    DensityEstimate est;
    est.method = DensityMethod::Malliavin;
    est.x.assign(x_grid.begin(), x_grid.end());
    if (centering) est.pivot = quantile(F, 0.5);

    std::vector<double> c(F.size());
    for (double x : x_grid) {
        const double offset = est.pivot && x < *est.pivot ? 1.0 : 0.0;
        for (std::size_t i = 0; i < F.size(); ++i) c[i] = ((F[i] > x ? 1.0 : 0.0) - offset) * w[i];
        const auto s = summarize(c);
        est.p_hat.push_back(s.mean);
        est.se.push_back(s.se.value_or(kNaN));
    }
    est.normalization = est.x.size() >= 2 ? trapezoid(est.x, est.p_hat) : 0.0;
    return est;
}

DensityEstimate estimate_density_ou(std::span<const double> x_grid, const EnsembleResult& e, bool centering) {
    return estimate_density(x_grid, e.avg_variances(), e.weights(), centering);
}

DensityEstimate estimate_density_cir(std::span<const double> x_grid, const EnsembleResult& e, bool centering) {
    return estimate_density(x_grid, e.avg_variances(), e.weights(), centering);
}

Summary density_functional(std::span<const double> x_grid, std::span<const double> coeff,
                           std::span<const double> F, std::span<const double> w,
                           std::optional<double> pivot) {
    check_inputs(x_grid, F, w);
    if (coeff.size() != x_grid.size()) throw Error(ErrorCode::LengthMismatch, "density_functional: coefficient length");
    // per sample: delta_i * sum_j coeff_j (1{F_i > x_j} - 1{x_j < pivot})
    std::vector<double> c(F.size());
    double pivot_part = 0.0;
    if (pivot) {
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            if (x_grid[j] < *pivot) pivot_part += coeff[j];
        }
    }
    for (std::size_t i = 0; i < F.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            if (F[i] > x_grid[j]) s += coeff[j];
        }
        c[i] = (s - pivot_part) * w[i];
    }
    return summarize(c);
}

double silverman_bandwidth(std::span<const double> samples) {
    const double sd = std::sqrt(sample_variance(samples));
    return 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
}

DensityEstimate kde_density(std::span<const double> samples, std::span<const double> x_grid) {
    constexpr std::size_t kBlocks = 10;
    if (samples.size() < 100) throw Error(ErrorCode::TooFewSamples, "kde_density needs at least 100 samples");
    double h = silverman_bandwidth(samples);
    if (!(h > 0.0)) {
        h = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j < x_grid.size(); ++j) h = std::min(h, x_grid[j] - x_grid[j - 1]);
        if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "kde_density: degenerate samples and grid");
    }
    const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
    const std::size_t n = samples.size();

    DensityEstimate est;
    est.method = DensityMethod::Kde;
    est.x.assign(x_grid.begin(), x_grid.end());
    std::vector<double> k(n), block_means(kBlocks);
    for (double x : x_grid) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (x - samples[i]) / h;
            k[i] = norm * std::exp(-0.5 * u * u);
        }
        est.p_hat.push_back(mean(k));
        for (std::size_t b = 0; b < kBlocks; ++b) {
            const std::size_t lo = b * n / kBlocks, hi = (b + 1) * n / kBlocks;
            block_means[b] = mean(std::span<const double>(k).subspan(lo, hi - lo));
        }
        est.se.push_back(std::sqrt(sample_variance(block_means) / kBlocks));
    }
    est.normalization = est.x.size() >= 2 ? trapezoid(est.x, est.p_hat) : 0.0;
    return est;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::InvalidArgument, "linear_grid needs lo < hi and at least 2 points");
    }
    std::vector<double> g(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t j = 0; j < points; ++j) g[j] = lo + step * static_cast<double>(j);
    g.back() = hi;
    return g;
}

std::vector<double> auto_density_grid(std::span<const double> F, double lower_support, std::size_t points,
                                      bool cover_max) {
    if (F.empty()) throw Error(ErrorCode::EmptyEnsemble, "auto_density_grid: no samples");
    const double lo = std::max(lower_support, 0.5 * quantile(F, 0.01));
    double hi = 1.2 * quantile(F, 0.99);
    if (cover_max) hi = std::max(hi, *std::max_element(F.begin(), F.end()));
    return linear_grid(lo, hi, points);
}

}  // namespace malvol
