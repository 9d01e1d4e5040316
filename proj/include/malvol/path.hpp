#pragma once
// =============================================================================
// Path engine
//
// Discretization conventions used throughout the library:
//   - uniform grid t_i = i dt, i = 0..n
//   - dt-integrals: trapezoid rule on the nodes of the integration interval
//   - dW~-integrals: left-point (Ito) sums  sum_{i<j} f(t_i) dW~_i
//
// OU uses the exact Gaussian transition; the stored increment is
// dW~_i = xi_i sqrt(dt), the same normal that drives Y_{i+1}.
// CIR uses full-truncation Euler floored at kCirFloor.
// =============================================================================

#include <cstddef>
#include <span>
#include <vector>

#include "malvol/model.hpp"
#include "malvol/noise.hpp"

namespace malvol {

struct TimeGrid {
    double maturity = 0.0;
    std::size_t n_steps = 0;
    double dt = 0.0;

    double time(std::size_t i) const noexcept {
        return i == n_steps ? maturity : static_cast<double>(i) * dt;
    }
    std::size_t n_nodes() const noexcept { return n_steps + 1; }
    std::vector<double> nodes() const;
    /// Trapezoid weights on the full grid: dt/2 at the ends, dt inside.
    std::vector<double> weights() const;
};

/// Throws InvalidGrid unless T > 0 and n_steps >= 2.
TimeGrid make_grid(double T, std::size_t n_steps);

enum class ModelTag { OU, CIR };

inline constexpr double kCirFloor = 1e-12;

struct PathBundle {
    ModelTag model = ModelTag::OU;
    TimeGrid grid;
    std::vector<double> dW_tilde;        ///< n increments of W~
    std::vector<double> states;          ///< Y_i or Z_i, n+1 nodes
    double avg_variance = 0.0;           ///< (1/T) int sigma^2(Y) ds  or  (1/T) int Z ds
    std::vector<double> ito_prefix;      ///< OU: int_0^{t_i} e^{alpha h} dW~;  CIR: int_0^{t_i} phi(h)^{-1} dW~
    std::vector<double> recip_integral;  ///< CIR only: R_i = int_0^{t_i} ds / Z_s
    std::size_t floored_steps = 0;       ///< CIR only
};

/// Left-point prefix sums P_j = sum_{i<j} f(t_i) dW~_i, P_0 = 0.
/// `integrand` must have one value per node (n+1); throws LengthMismatch otherwise.
std::vector<double> ito_prefix_sums(const PathBundle& path, std::span<const double> integrand);
std::vector<double> ito_prefix_sums(std::span<const double> dW, std::span<const double> integrand);

/// Exact OU transition driven by the given standard normals (one per step).
/// Accepts k_ou = 0 (deterministic decay); no assumption checks are made.
PathBundle simulate_ou_path(const OUParams& params, const VolFunctionSpec& vol,
                            const TimeGrid& grid, std::span<const double> normals);

PathBundle simulate_ou_path(const ValidatedOUModel& model, const TimeGrid& grid,
                            const NoiseStream& stream);

/// Full-truncation Euler driven by the given normals. Throws FloorSaturation
/// when more than 0.1% of steps hit the floor.
PathBundle simulate_cir_path(const CIRParams& params, const TimeGrid& grid,
                             std::span<const double> normals);

PathBundle simulate_cir_path(const ValidatedCIRModel& model, const TimeGrid& grid,
                             const NoiseStream& stream);

/// S_T = s0 exp(rT - sigma_bar^2 T / 2 + sigma_bar sqrt(T) xi).
double sample_terminal_asset(const PathBundle& path, double s0, double r, double xi) noexcept;
double sample_terminal_asset(const PathBundle& path, double s0, double r,
                             const NoiseStream& asset_stream) noexcept;

}  // namespace malvol
