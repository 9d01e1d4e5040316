#include "malvol/malliavin_ou.hpp"

#include <cmath>
#include <string>

#include "malvol/error.hpp"

namespace malvol {

namespace {

void require_nodes(std::span<const double> v, const TimeGrid& grid, const char* what) {
    if (v.size() != grid.n_nodes()) {
        throw Error(ErrorCode::LengthMismatch, std::string(what) + ": expected one value per node");
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorCode::Overflow, std::string(what) + " is not finite");
}

// trapezoid over [t_0, t_i] for each i
std::vector<double> cumtrapz(std::span<const double> f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
    return out;
}

}  // namespace

double ou_kernel(double alpha, double t1, double t2) noexcept {
    return std::exp(-alpha * std::abs(t1 - t2)) - std::exp(-alpha * (t1 + t2));
}

std::vector<double> ou_kernel_row_sums(double alpha, const TimeGrid& grid, std::span<const double> f) {
    require_nodes(f, grid, "ou_kernel_row_sums");
    const std::size_t n = grid.n_steps;
    const auto w = grid.weights();
    const double decay = std::exp(-alpha * grid.dt);

    std::vector<double> wf(n + 1);
    for (std::size_t a = 0; a <= n; ++a) wf[a] = w[a] * f[a];

    // left[b] = sum_{a<=b} wf_a e^{-alpha(t_b - t_a)}, right[b] likewise for a >= b
    std::vector<double> left(n + 1), right(n + 1);
    left[0] = wf[0];
    for (std::size_t b = 1; b <= n; ++b) left[b] = decay * left[b - 1] + wf[b];
    right[n] = wf[n];
    for (std::size_t b = n; b-- > 0;) right[b] = decay * right[b + 1] + wf[b];

    double separable = 0.0;
    for (std::size_t a = 0; a <= n; ++a) separable += wf[a] * std::exp(-alpha * grid.time(a));

    std::vector<double> M(n + 1);
    for (std::size_t b = 0; b <= n; ++b) {
        M[b] = left[b] + right[b] - wf[b] - std::exp(-alpha * grid.time(b)) * separable;
    }
    return M;
}

double compute_denominator_G(double alpha, const TimeGrid& grid, std::span<const double> nu) {
    const auto M = ou_kernel_row_sums(alpha, grid, nu);
    const auto w = grid.weights();
    double G = 0.0;
    for (std::size_t b = 0; b < M.size(); ++b) G += w[b] * nu[b] * M[b];
    require_finite(G, "G");
    if (!(G > 0.0)) {
        throw Error(ErrorCode::NonPositiveDenominator, "OU denominator G = " + std::to_string(G));
    }
    return G;
}

double compute_denominator_G(const PathBundle& path, const VolFunctionSpec& vol, double alpha) {
    std::vector<double> nu(path.states.size());
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = vol.nu(path.states[i]);
    return compute_denominator_G(alpha, path.grid, nu);
}

std::vector<double> compute_eta(double alpha, double k_ou, const TimeGrid& grid,
                                std::span<const double> nu, double G) {
    require_nodes(nu, grid, "compute_eta");
    if (!(G > 0.0)) throw Error(ErrorCode::NonPositiveDenominator, "compute_eta: G must be positive");
    const double scale = alpha * grid.maturity / k_ou;
    std::vector<double> eta(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) {
        eta[i] = scale * std::exp(-alpha * grid.time(i)) * nu[i] / G;
    }
    return eta;
}

std::vector<double> compute_C_of_h(double alpha, const TimeGrid& grid,
                                   std::span<const double> nu_prime, std::span<const double> row_sums) {
    require_nodes(nu_prime, grid, "compute_C_of_h");
    require_nodes(row_sums, grid, "compute_C_of_h");
    const std::size_t n = grid.n_steps;
    const double dt = grid.dt;
    std::vector<double> c(n + 1);
    for (std::size_t b = 0; b <= n; ++b) c[b] = std::exp(-alpha * grid.time(b)) * nu_prime[b] * row_sums[b];

    // trapezoid on [t_j, T]: suffix of interval contributions
    std::vector<double> C(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) C[j] = C[j + 1] + 0.5 * dt * (c[j] + c[j + 1]);
    return C;
}

OUKernelState compute_ou_kernel(const PathBundle& path, const OUParams& params,
                                const VolFunctionSpec& vol) {
    const TimeGrid& grid = path.grid;
    OUKernelState s;
    s.alpha = params.alpha;
    s.k_ou = params.k_ou;
    s.maturity = grid.maturity;
    s.nu_vals.resize(path.states.size());
    s.nu_prime_vals.resize(path.states.size());
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        s.nu_vals[i] = vol.nu(path.states[i]);
        s.nu_prime_vals[i] = vol.nu_prime(path.states[i]);
        if (!std::isfinite(s.nu_vals[i]) || !std::isfinite(s.nu_prime_vals[i])) {
            throw Error(ErrorCode::Overflow, "nu or nu' not finite on path");
        }
        if (!(s.nu_vals[i] > 0.0)) {
            throw Error(ErrorCode::HypothesisViolation, "nu(Y) <= 0 on path");
        }
    }
    s.row_sums = ou_kernel_row_sums(s.alpha, grid, s.nu_vals);
    const auto w = grid.weights();
    double G = 0.0;
    for (std::size_t b = 0; b < s.row_sums.size(); ++b) G += w[b] * s.nu_vals[b] * s.row_sums[b];
    require_finite(G, "G");
    if (!(G > 0.0)) {
        throw Error(ErrorCode::NonPositiveDenominator, "OU denominator G = " + std::to_string(G));
    }
    s.G = G;
    s.eta = compute_eta(s.alpha, s.k_ou, grid, s.nu_vals, G);
    s.C_of_h = compute_C_of_h(s.alpha, grid, s.nu_prime_vals, s.row_sums);
    return s;
}

double d_eta(const OUKernelState& s, const TimeGrid& grid, std::size_t j, std::size_t i) {
    const double a = s.alpha;
    const double th = grid.time(j);
    const double t = grid.time(i);
    const double direct = j <= i ? std::exp(-a * (t - th)) * s.nu_prime_vals[i] / s.G : 0.0;
    const double correction = 2.0 * s.nu_vals[i] * std::exp(a * th) * s.C_of_h[j] / (s.G * s.G);
    return a * s.maturity * std::exp(-a * t) * (direct - correction);
}

std::vector<double> compute_d_eta_inner(const OUKernelState& s, const TimeGrid& grid) {
    const std::size_t n = grid.n_steps;
    const double a = s.alpha;
    std::vector<double> e2(n + 1), e2C(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        e2[j] = std::exp(2.0 * a * grid.time(j));
        e2C[j] = e2[j] * s.C_of_h[j];
    }
    const auto Q = cumtrapz(e2, grid.dt);
    const auto U = cumtrapz(e2C, grid.dt);
    std::vector<double> inner(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = grid.time(i);
        inner[i] = a * s.maturity *
                   (std::exp(-2.0 * a * t) * s.nu_prime_vals[i] * Q[i] / s.G -
                    2.0 * std::exp(-a * t) * s.nu_vals[i] * U[i] / (s.G * s.G));
    }
    return inner;
}

OUWeight compute_weight_ou(const PathBundle& path, const OUKernelState& s) {
    const TimeGrid& grid = path.grid;
    if (path.ito_prefix.size() != grid.n_nodes()) {
        throw Error(ErrorCode::LengthMismatch, "compute_weight_ou: path lacks Ito prefix sums");
    }
    const auto w = grid.weights();
    const auto inner = compute_d_eta_inner(s, grid);
    OUWeight out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out.term_ito += w[i] * s.eta[i] * path.ito_prefix[i];
        out.term_trace += w[i] * inner[i];
    }
    out.delta_bar = out.term_ito - out.term_trace;
    out.G = s.G;
    require_finite(out.delta_bar, "OU weight");
    return out;
}

OUWeight ou_weight(const PathBundle& path, const ValidatedOUModel& model) {
    return compute_weight_ou(path, compute_ou_kernel(path, model.params(), model.vol()));
}

}  // namespace malvol
