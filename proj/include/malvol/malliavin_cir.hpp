#pragma once
// Malliavin weight for the averaged variance of the CIR model.
//
//   F          = (1/T) int Z_s ds
//   log phi(t) = -t/2 - q int_0^t ds/Z_s,  q = b/2 - k^2/8
//   psi_{h,t}  = phi(t)/phi(h),  Psi_{h,t} = psi_{h,t} / I
//   I          = int int g(t1) g(t2) F(t1 ^ t2) dt1 dt2,  g = sqrt(Z) phi,  F(t) = int_0^t phi^{-2}
//   delta      = (T/k) int sqrt(Z_t) (int_0^t Psi_{h,t} dW~_h) dt - (T/2) int int_0^t Psi psi dh dt
//
// The inner integral is a Skorokhod integral: Psi_{h,t} depends on the path
// after h through phi(t) and I. Writing it as (phi(t)/I) int phi^{-1} dW~ (an
// Ito integral) leaves out  - int_0^t D_h(phi(t)/I) phi(h)^{-1} dh, which
// this module adds back as term_anticipating. With
//   J(t) = int_0^t phi Z^{-3/2},  H(t) = int_0^t phi^{-2} J,
//   D_h phi(t) = k q phi(t) phi(h)^{-1} (J(t) - J(h)),
//   D_h g(t)   = (k/phi(h)) [phi(t)^2/2 + q g(t) (J(t) - J(h))]
// the correction is A1 + A2 with
//   A1 = (T q / I)      int g(t) (J(t) F(t) - H(t)) dt
//   A2 = -(T / (k I^2)) int g(t) int_0^t phi(h)^{-1} D_h I dh dt.
//
// phi is stored with a constant shift (exp(log phi - shift)); every output is
// invariant to that scale.

#include <cstddef>
#include <vector>

#include "malvol/model.hpp"
#include "malvol/path.hpp"

namespace malvol {

struct CIRKernelState {
    double q = 0.0;
    double k_cir = 0.0;
    double maturity = 0.0;
    double shift = 0.0;            ///< phi = exp(log_phi - shift)
    std::vector<double> log_phi;   ///< unshifted
    std::vector<double> phi;       ///< shifted
    std::vector<double> g;         ///< sqrt(Z) phi
    std::vector<double> F_prefix;  ///< int_0^t phi^{-2}
    std::vector<double> J;         ///< int_0^t phi Z^{-3/2}
    std::vector<double> H;         ///< int_0^t phi^{-2} J
    std::vector<double> ito;       ///< int_0^t phi^{-1} dW~ (left point)
    double I = 0.0;
};

struct CIRWeight {
    double delta_tilde = 0.0;
    double term_ito = 0.0;
    double term_trace = 0.0;
    double term_anticipating = 0.0;  ///< zero when the correction is switched off
    double I = 0.0;
};

/// Builds log_phi, phi, g, F, J, H and the Ito prefix; no denominator yet.
/// Throws Overflow if the shifted exponentials are not finite.
CIRKernelState compute_phi_and_F(const PathBundle& path, const CIRParams& params);

/// I = sum_a sum_b w_a w_b g_a g_b F_{min(a,b)}, O(n). Throws NonPositiveDenominator.
double compute_denominator_I(const CIRKernelState& kernel, const TimeGrid& grid);

/// compute_phi_and_F followed by compute_denominator_I.
CIRKernelState compute_cir_kernel(const PathBundle& path, const CIRParams& params);

double psi(const CIRKernelState& kernel, std::size_t h, std::size_t t) noexcept;
double Psi(const CIRKernelState& kernel, std::size_t h, std::size_t t) noexcept;

/// D_{t_j} I for every node j, O(n).
std::vector<double> compute_d_denominator(const CIRKernelState& kernel, const PathBundle& path);

CIRWeight compute_weight_cir(const PathBundle& path, const CIRKernelState& kernel,
                             bool anticipating_correction = true);

CIRWeight cir_weight(const PathBundle& path, const ValidatedCIRModel& model);

}  // namespace malvol
