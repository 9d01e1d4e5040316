#pragma once
// Direct O(n^2) .. O(n^3) evaluations of the weight ingredients, written from
// the defining integrals with no factorization. Used as oracles for the O(n)
// kernels in tests and in the self-check battery.

#include <cstddef>
#include <span>
#include <vector>

#include "malvol/model.hpp"
#include "malvol/path.hpp"

namespace malvol::brute {

/// Trapezoid weights for the nodes of [t_lo, t_hi] placed on the full grid (zero outside).
std::vector<double> sub_weights(const TimeGrid& grid, std::size_t lo, std::size_t hi);

double G(double alpha, const TimeGrid& grid, std::span<const double> nu);

std::vector<double> C_of_h(double alpha, const TimeGrid& grid, std::span<const double> nu,
                           std::span<const double> nu_prime);

struct OUTerms {
    double term_ito = 0.0;
    double term_trace = 0.0;
    double G = 0.0;
    std::vector<std::vector<double>> d_eta;  ///< d_eta[j][i] = D_{t_j} eta_{t_i}
};

/// D_h eta from the two-summand expression (derivative of nu in either slot of G).
OUTerms ou_terms(const PathBundle& path, const OUParams& params, const VolFunctionSpec& vol);

struct CIRTerms {
    double I = 0.0;
    double term_ito = 0.0;
    double term_trace = 0.0;
    double term_anticipating = 0.0;
    std::vector<double> d_I;
};

CIRTerms cir_terms(const PathBundle& path, const CIRParams& params);

}  // namespace malvol::brute
