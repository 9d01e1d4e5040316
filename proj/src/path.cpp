#include "malvol/path.hpp"

#include <cmath>
#include <string>

#include "malvol/error.hpp"

namespace malvol {

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> t(n_nodes());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
    return t;
}

std::vector<double> TimeGrid::weights() const {
    std::vector<double> w(n_nodes(), dt);
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
    return w;
}

TimeGrid make_grid(double T, std::size_t n_steps) {
    if (!(T > 0.0) || !std::isfinite(T) || n_steps < 2) {
        throw Error(ErrorCode::InvalidGrid, "grid requires T > 0 and n_steps >= 2 (got T=" +
                                                std::to_string(T) +
                                                ", n=" + std::to_string(n_steps) + ")");
    }
    return TimeGrid{T, n_steps, T / static_cast<double>(n_steps)};
}

std::vector<double> ito_prefix_sums(std::span<const double> dW, std::span<const double> integrand) {
    if (integrand.size() != dW.size() + 1) {
        throw Error(ErrorCode::LengthMismatch, "ito_prefix_sums: integrand needs one value per node");
    }
    std::vector<double> prefix(integrand.size(), 0.0);
    for (std::size_t i = 0; i < dW.size(); ++i) prefix[i + 1] = prefix[i] + integrand[i] * dW[i];
    return prefix;
}

std::vector<double> ito_prefix_sums(const PathBundle& path, std::span<const double> integrand) {
    return ito_prefix_sums(path.dW_tilde, integrand);
}

namespace {

double trapezoid_average(std::span<const double> values, const TimeGrid& grid) {
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * grid.dt / grid.maturity;
}

void require_normals(std::span<const double> normals, const TimeGrid& grid) {
    if (normals.size() != grid.n_steps) {
        throw Error(ErrorCode::LengthMismatch, "path simulation needs one normal per step");
    }
}

}  // namespace

PathBundle simulate_ou_path(const OUParams& p, const VolFunctionSpec& vol, const TimeGrid& grid,
                            std::span<const double> normals) {
    require_normals(normals, grid);
    const std::size_t n = grid.n_steps;
    const double dt = grid.dt;
    const double decay = std::exp(-p.alpha * dt);
    const double step_sd = p.k_ou * std::sqrt(-std::expm1(-2.0 * p.alpha * dt) / (2.0 * p.alpha));
    const double sqrt_dt = std::sqrt(dt);

    PathBundle path;
    path.model = ModelTag::OU;
    path.grid = grid;
    path.dW_tilde.resize(n);
    path.states.resize(n + 1);
    path.states[0] = p.y0;
    for (std::size_t i = 0; i < n; ++i) {
        path.states[i + 1] = path.states[i] * decay + step_sd * normals[i];
        path.dW_tilde[i] = normals[i] * sqrt_dt;
    }

    std::vector<double> sig2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = vol.sigma(path.states[i]);
        sig2[i] = s * s;
    }
    path.avg_variance = trapezoid_average(sig2, grid);

    std::vector<double> growth(n + 1);
    for (std::size_t i = 0; i <= n; ++i) growth[i] = std::exp(p.alpha * grid.time(i));
    path.ito_prefix = ito_prefix_sums(path.dW_tilde, growth);
    return path;
}

PathBundle simulate_ou_path(const ValidatedOUModel& model, const TimeGrid& grid,
                            const NoiseStream& stream) {
    std::vector<double> normals(grid.n_steps);
    stream.fill_normals(normals);
    return simulate_ou_path(model.params(), model.vol(), grid, normals);
}

PathBundle simulate_cir_path(const CIRParams& p, const TimeGrid& grid,
                             std::span<const double> normals) {
    require_normals(normals, grid);
    const std::size_t n = grid.n_steps;
    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);

    PathBundle path;
    path.model = ModelTag::CIR;
    path.grid = grid;
    path.dW_tilde.resize(n);
    path.states.resize(n + 1);
    path.states[0] = p.z0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = path.states[i];
        const double dw = normals[i] * sqrt_dt;
        double next = z + (p.b - z) * dt + p.k_cir * std::sqrt(std::max(z, 0.0)) * dw;
        if (!(next >= kCirFloor)) {
            next = kCirFloor;
            ++path.floored_steps;
        }
        path.states[i + 1] = next;
        path.dW_tilde[i] = dw;
    }
    if (static_cast<double>(path.floored_steps) > 1e-3 * static_cast<double>(n)) {
        throw Error(ErrorCode::FloorSaturation,
                    "CIR path floored on " + std::to_string(path.floored_steps) + " of " +
                        std::to_string(n) + " steps; refine the grid");
    }

    path.avg_variance = trapezoid_average(path.states, grid);

    path.recip_integral.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        path.recip_integral[i + 1] =
            path.recip_integral[i] + 0.5 * dt * (1.0 / path.states[i] + 1.0 / path.states[i + 1]);
    }

    // phi(h)^{-1} = exp(h/2 + q R_h), unshifted
    const double q = p.b / 2.0 - p.k_cir * p.k_cir / 8.0;
    std::vector<double> inv_phi(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        inv_phi[i] = std::exp(0.5 * grid.time(i) + q * path.recip_integral[i]);
    }
    path.ito_prefix = ito_prefix_sums(path.dW_tilde, inv_phi);
    return path;
}

PathBundle simulate_cir_path(const ValidatedCIRModel& model, const TimeGrid& grid,
                             const NoiseStream& stream) {
    std::vector<double> normals(grid.n_steps);
    stream.fill_normals(normals);
    return simulate_cir_path(model.params(), grid, normals);
}

double sample_terminal_asset(const PathBundle& path, double s0, double r, double xi) noexcept {
    const double T = path.grid.maturity;
    const double var = path.avg_variance;
    return s0 * std::exp(r * T - 0.5 * var * T + std::sqrt(var * T) * xi);
}

double sample_terminal_asset(const PathBundle& path, double s0, double r,
                             const NoiseStream& asset_stream) noexcept {
    return sample_terminal_asset(path, s0, r, asset_stream.normal(0));
}

}  // namespace malvol
