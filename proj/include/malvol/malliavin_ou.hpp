#pragma once
// Malliavin weight for the averaged variance of the OU-driven model.
//
//   F      = (1/T) int sigma^2(Y_s) ds
//   G      = int int K(t1,t2) nu(Y_t1) nu(Y_t2) dt1 dt2,
//            K(t1,t2) = e^{-alpha|t1-t2|} - e^{-alpha(t1+t2)}
//   eta_t  = (alpha T / k) e^{-alpha t} nu(Y_t) / G
//   delta  = int eta_t (int_0^t e^{alpha h} dW~_h) dt - int int_0^t e^{alpha h} D_h eta_t dh dt
//
// and p_F(x) = E[1{F > x} delta].
//
// D_h Y_t = k e^{-alpha(t-h)} 1{h <= t}, so
//   D_h eta_t = alpha T e^{-alpha t} [ e^{-alpha(t-h)} 1{h<=t} nu'(Y_t) / G
//                                      - 2 nu(Y_t) e^{alpha h} C(h) / G^2 ]
//   C(h)      = int_0^T int_h^T K(t1,t2) nu(Y_t1) e^{-alpha t2} nu'(Y_t2) dt2 dt1.
// Every dt-integral is the trapezoid rule on grid nodes (sub-intervals included).

#include <cstddef>
#include <span>
#include <vector>

#include "malvol/model.hpp"
#include "malvol/path.hpp"

namespace malvol {

struct OUKernelState {
    double alpha = 0.0;
    double k_ou = 0.0;
    double maturity = 0.0;
    std::vector<double> nu_vals;
    std::vector<double> nu_prime_vals;
    std::vector<double> row_sums;  ///< M_b = sum_a w_a K(t_a,t_b) nu_a
    double G = 0.0;
    std::vector<double> eta;
    std::vector<double> C_of_h;
};

struct OUWeight {
    double delta_bar = 0.0;
    double term_ito = 0.0;
    double term_trace = 0.0;
    double G = 0.0;
};

/// K(t1,t2) = e^{-alpha|t1-t2|} - e^{-alpha(t1+t2)}.
double ou_kernel(double alpha, double t1, double t2) noexcept;

/// M_b = sum_a w_a K(t_a, t_b) f_a with trapezoid weights w, O(n).
std::vector<double> ou_kernel_row_sums(double alpha, const TimeGrid& grid, std::span<const double> f);

/// Discretized G for per-node values of nu. Throws NonPositiveDenominator if G <= 0.
double compute_denominator_G(double alpha, const TimeGrid& grid, std::span<const double> nu);
double compute_denominator_G(const PathBundle& path, const VolFunctionSpec& vol, double alpha);

/// eta_i = (alpha T / k) e^{-alpha t_i} nu_i / G.
std::vector<double> compute_eta(double alpha, double k_ou, const TimeGrid& grid,
                                std::span<const double> nu, double G);

/// C(t_j) for every node j from the row sums M, O(n).
std::vector<double> compute_C_of_h(double alpha, const TimeGrid& grid,
                                   std::span<const double> nu_prime, std::span<const double> row_sums);

/// Full per-path kernel state. Throws NonPositiveDenominator or Overflow.
OUKernelState compute_ou_kernel(const PathBundle& path, const OUParams& params,
                                const VolFunctionSpec& vol);

/// D_h eta_t at nodes h = t_j, t = t_i (closed indicator j <= i).
double d_eta(const OUKernelState& kernel, const TimeGrid& grid, std::size_t j, std::size_t i);

/// Per-node inner integrals int_0^{t_i} e^{alpha h} D_h eta_{t_i} dh, O(n).
std::vector<double> compute_d_eta_inner(const OUKernelState& kernel, const TimeGrid& grid);

OUWeight compute_weight_ou(const PathBundle& path, const OUKernelState& kernel);

/// Convenience: kernel plus weight.
OUWeight ou_weight(const PathBundle& path, const ValidatedOUModel& model);

}  // namespace malvol
