#include "malvol/malliavin_cir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "malvol/error.hpp"

namespace malvol {

namespace {

std::vector<double> cumtrapz(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] + f[i]);
    return out;
}

// trapezoid on [t_j, T] of f, for every j
std::vector<double> suffix_trapz(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t j = f.size() - 1; j-- > 0;) out[j] = out[j + 1] + 0.5 * dt * (f[j] + f[j + 1]);
    return out;
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw Error(ErrorCode::Overflow, std::string(what) + " overflowed on path");
    }
}

}  // namespace

CIRKernelState compute_phi_and_F(const PathBundle& path, const CIRParams& p) {
    const TimeGrid& grid = path.grid;
    const std::size_t n = grid.n_steps;
    if (path.recip_integral.size() != n + 1 || path.states.size() != n + 1) {
        throw Error(ErrorCode::LengthMismatch, "compute_phi_and_F: not a CIR path");
    }
    CIRKernelState s;
    s.q = p.b / 2.0 - p.k_cir * p.k_cir / 8.0;
    s.k_cir = p.k_cir;
    s.maturity = grid.maturity;

    s.log_phi.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) s.log_phi[i] = -0.5 * grid.time(i) - s.q * path.recip_integral[i];
    // centre the range of log phi on zero
    const auto [lo, hi] = std::minmax_element(s.log_phi.begin(), s.log_phi.end());
    s.shift = 0.5 * (*lo + *hi);

    s.phi.resize(n + 1);
    s.g.resize(n + 1);
    std::vector<double> inv_phi(n + 1), inv_phi2(n + 1), phi_z(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double l = s.log_phi[i] - s.shift;
        const double z = path.states[i];
        s.phi[i] = std::exp(l);
        inv_phi[i] = std::exp(-l);
        inv_phi2[i] = std::exp(-2.0 * l);
        s.g[i] = std::sqrt(z) * s.phi[i];
        phi_z[i] = s.phi[i] / (z * std::sqrt(z));
    }
    check_finite(inv_phi2, "phi^-2");
    check_finite(phi_z, "phi Z^-3/2");

    s.F_prefix = cumtrapz(inv_phi2, grid.dt);
    s.J = cumtrapz(phi_z, grid.dt);
    std::vector<double> jf(n + 1);
    for (std::size_t i = 0; i <= n; ++i) jf[i] = inv_phi2[i] * s.J[i];
    s.H = cumtrapz(jf, grid.dt);
    s.ito = ito_prefix_sums(path.dW_tilde, inv_phi);
    check_finite(s.H, "H");
    check_finite(s.ito, "Ito prefix");
    return s;
}

double compute_denominator_I(const CIRKernelState& s, const TimeGrid& grid) {
    const auto w = grid.weights();
    const std::size_t n = grid.n_steps;
    double I = 0.0;
    double tail = 0.0;  // sum_{b > a} w_b g_b
    for (std::size_t a = n + 1; a-- > 0;) {
        const double wg = w[a] * s.g[a];
        I += wg * s.F_prefix[a] * (wg + 2.0 * tail);
        tail += wg;
    }
    if (!std::isfinite(I)) throw Error(ErrorCode::Overflow, "CIR denominator I overflowed");
    if (!(I > 0.0)) {
        throw Error(ErrorCode::NonPositiveDenominator, "CIR denominator I = " + std::to_string(I));
    }
    return I;
}

CIRKernelState compute_cir_kernel(const PathBundle& path, const CIRParams& params) {
    auto s = compute_phi_and_F(path, params);
    s.I = compute_denominator_I(s, path.grid);
    return s;
}

double psi(const CIRKernelState& s, std::size_t h, std::size_t t) noexcept {
    return std::exp(s.log_phi[t] - s.log_phi[h]);
}

double Psi(const CIRKernelState& s, std::size_t h, std::size_t t) noexcept {
    return psi(s, h, t) / s.I;
}

std::vector<double> compute_d_denominator(const CIRKernelState& s, const PathBundle& path) {
    const TimeGrid& grid = path.grid;
    const std::size_t n = grid.n_steps;
    const auto w = grid.weights();
    const double k = s.k_cir;
    const double q = s.q;

    // M_a = sum_b w_b g_b F_{min(a,b)}
    std::vector<double> M(n + 1);
    {
        std::vector<double> head(n + 1);  // sum_{b<=a} w_b g_b F_b
        double acc = 0.0;
        for (std::size_t a = 0; a <= n; ++a) {
            acc += w[a] * s.g[a] * s.F_prefix[a];
            head[a] = acc;
        }
        double tail = 0.0;  // sum_{b>a} w_b g_b
        for (std::size_t a = n + 1; a-- > 0;) {
            M[a] = head[a] + s.F_prefix[a] * tail;
            tail += w[a] * s.g[a];
        }
    }

    // first part: 2 int_h^T D_h g_a M_a da
    std::vector<double> f1(n + 1), f2(n + 1);
    for (std::size_t a = 0; a <= n; ++a) {
        f1[a] = (0.5 * s.phi[a] * s.phi[a] + q * s.g[a] * s.J[a]) * M[a];
        f2[a] = s.g[a] * M[a];
    }
    const auto S1 = suffix_trapz(f1, grid.dt);
    const auto S2 = suffix_trapz(f2, grid.dt);

    // second part: sum_c omega_c D_h F_c
    std::vector<double> Om(n + 2, 0.0), OmH(n + 2, 0.0), OmF(n + 2, 0.0);
    {
        double tail = 0.0;
        for (std::size_t c = n + 1; c-- > 0;) {
            const double wg = w[c] * s.g[c];
            const double omega = wg * (wg + 2.0 * tail);
            tail += wg;
            Om[c] = Om[c + 1] + omega;
            OmH[c] = OmH[c + 1] + omega * s.H[c];
            OmF[c] = OmF[c + 1] + omega * s.F_prefix[c];
        }
    }

    std::vector<double> dI(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double inv = 1.0 / s.phi[j];
        const double term1 = 2.0 * k * inv * (S1[j] - q * s.J[j] * S2[j]);
        const double term2 = -2.0 * k * q * inv *
                             ((OmH[j] - s.H[j] * Om[j]) - s.J[j] * (OmF[j] - s.F_prefix[j] * Om[j]));
        dI[j] = term1 + term2;
    }
    return dI;
}

CIRWeight compute_weight_cir(const PathBundle& path, const CIRKernelState& s,
                             bool anticipating_correction) {
    const TimeGrid& grid = path.grid;
    const std::size_t n = grid.n_steps;
    const auto w = grid.weights();
    const double T = s.maturity;
    const double k = s.k_cir;
    if (!(s.I > 0.0)) throw Error(ErrorCode::NonPositiveDenominator, "compute_weight_cir: I not set");

    CIRWeight out;
    out.I = s.I;
    double ito = 0.0, trace = 0.0;
    for (std::size_t t = 0; t <= n; ++t) {
        ito += w[t] * s.g[t] * s.ito[t];
        trace += w[t] * s.phi[t] * s.phi[t] * s.F_prefix[t];
    }
    out.term_ito = T / (k * s.I) * ito;
    out.term_trace = T / (2.0 * s.I) * trace;

    if (anticipating_correction) {
        const auto dI = compute_d_denominator(s, path);
        std::vector<double> e(n + 1);
        for (std::size_t j = 0; j <= n; ++j) e[j] = dI[j] / s.phi[j];
        const auto E = cumtrapz(e, grid.dt);
        double a1 = 0.0, a2 = 0.0;
        for (std::size_t t = 0; t <= n; ++t) {
            a1 += w[t] * s.g[t] * (s.J[t] * s.F_prefix[t] - s.H[t]);
            a2 += w[t] * s.g[t] * E[t];
        }
        out.term_anticipating = T * s.q / s.I * a1 - T / (k * s.I * s.I) * a2;
    }
    out.delta_tilde = out.term_ito - out.term_trace - out.term_anticipating;
    if (!std::isfinite(out.delta_tilde)) throw Error(ErrorCode::Overflow, "CIR weight not finite");
    return out;
}

CIRWeight cir_weight(const PathBundle& path, const ValidatedCIRModel& model) {
    return compute_weight_cir(path, compute_cir_kernel(path, model.params()));
}

}  // namespace malvol
