#include "malvol/brute_force.hpp"

#include <algorithm>
#include <cmath>

#include "malvol/malliavin_ou.hpp"

namespace malvol::brute {

std::vector<double> sub_weights(const TimeGrid& grid, std::size_t lo, std::size_t hi) {
    std::vector<double> w(grid.n_nodes(), 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
        w[i] += 0.5 * grid.dt;
        w[i + 1] += 0.5 * grid.dt;
    }
    return w;
}

double G(double alpha, const TimeGrid& grid, std::span<const double> nu) {
    const auto w = grid.weights();
    double g = 0.0;
    for (std::size_t a = 0; a < w.size(); ++a) {
        for (std::size_t b = 0; b < w.size(); ++b) {
            g += w[a] * w[b] * ou_kernel(alpha, grid.time(a), grid.time(b)) * nu[a] * nu[b];
        }
    }
    return g;
}

std::vector<double> C_of_h(double alpha, const TimeGrid& grid, std::span<const double> nu,
                           std::span<const double> nu_prime) {
    const std::size_t n = grid.n_steps;
    const auto w = grid.weights();
    std::vector<double> C(n + 1, 0.0);
    for (std::size_t h = 0; h <= n; ++h) {
        const auto v = sub_weights(grid, h, n);
        double s = 0.0;
        for (std::size_t a = 0; a <= n; ++a) {
            for (std::size_t b = h; b <= n; ++b) {
                s += w[a] * v[b] * ou_kernel(alpha, grid.time(a), grid.time(b)) * nu[a] *
                     std::exp(-alpha * grid.time(b)) * nu_prime[b];
            }
        }
        C[h] = s;
    }
    return C;
}

OUTerms ou_terms(const PathBundle& path, const OUParams& p, const VolFunctionSpec& vol) {
    const TimeGrid& grid = path.grid;
    const std::size_t n = grid.n_steps;
    const double a = p.alpha, k = p.k_ou, T = grid.maturity;
    const auto w = grid.weights();
    std::vector<double> nu(n + 1), nup(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        nu[i] = vol.nu(path.states[i]);
        nup[i] = vol.nu_prime(path.states[i]);
    }
    OUTerms out;
    out.G = G(a, grid, nu);

    // D_h G = int int K [D_h nu_1 nu_2 + nu_1 D_h nu_2],  D_h nu(Y_s) = k e^{-a(s-h)} nu'(Y_s) 1{h<=s}
    std::vector<double> dG(n + 1, 0.0);
    for (std::size_t h = 0; h <= n; ++h) {
        const auto v = sub_weights(grid, h, n);
        const double th = grid.time(h);
        double first = 0.0, second = 0.0;
        for (std::size_t t1 = 0; t1 <= n; ++t1) {
            for (std::size_t t2 = 0; t2 <= n; ++t2) {
                const double K = ou_kernel(a, grid.time(t1), grid.time(t2));
                if (t1 >= h) {
                    first += v[t1] * w[t2] * K * k * std::exp(-a * (grid.time(t1) - th)) * nup[t1] * nu[t2];
                }
                if (t2 >= h) {
                    second += w[t1] * v[t2] * K * nu[t1] * k * std::exp(-a * (grid.time(t2) - th)) * nup[t2];
                }
            }
        }
        dG[h] = first + second;
    }

    out.d_eta.assign(n + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t h = 0; h <= n; ++h) {
        const double th = grid.time(h);
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = grid.time(i);
            const double d_nu = h <= i ? k * std::exp(-a * (t - th)) * nup[i] : 0.0;
            // eta = (aT/k) e^{-at} nu / G
            out.d_eta[h][i] = a * T / k * std::exp(-a * t) * (d_nu / out.G - nu[i] * dG[h] / (out.G * out.G));
        }
    }

    for (std::size_t i = 0; i <= n; ++i) {
        const double t = grid.time(i);
        const double eta = a * T / k * std::exp(-a * t) * nu[i] / out.G;
        double ito = 0.0;
        for (std::size_t j = 0; j < i; ++j) ito += std::exp(a * grid.time(j)) * path.dW_tilde[j];
        out.term_ito += w[i] * eta * ito;
        if (i > 0) {
            const auto v = sub_weights(grid, 0, i);
            double inner = 0.0;
            for (std::size_t j = 0; j <= i; ++j) inner += v[j] * std::exp(a * grid.time(j)) * out.d_eta[j][i];
            out.term_trace += w[i] * inner;
        }
    }
    return out;
}

CIRTerms cir_terms(const PathBundle& path, const CIRParams& p) {
    const TimeGrid& grid = path.grid;
    const std::size_t n = grid.n_steps;
    const double k = p.k_cir, T = grid.maturity;
    const double q = p.b / 2.0 - k * k / 8.0;
    const auto w = grid.weights();
    const auto& Z = path.states;

    std::vector<double> logphi(n + 1), phi(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        logphi[i] = -0.5 * grid.time(i) - q * path.recip_integral[i];
        phi[i] = std::exp(logphi[i]);
    }
    auto psi = [&](std::size_t h, std::size_t t) { return std::exp(logphi[t] - logphi[h]); };

    // F(t) = int_0^t phi^{-2}, written as int_0^t psi_{h,t}^2 dh / phi(t)^2
    std::vector<double> F(n + 1, 0.0);
    for (std::size_t t = 1; t <= n; ++t) {
        const auto v = sub_weights(grid, 0, t);
        for (std::size_t h = 0; h <= t; ++h) F[t] += v[h] / (phi[h] * phi[h]);
    }

    CIRTerms out;
    for (std::size_t t1 = 0; t1 <= n; ++t1) {
        for (std::size_t t2 = 0; t2 <= n; ++t2) {
            const std::size_t m = std::min(t1, t2);
            if (m == 0) continue;
            const auto v = sub_weights(grid, 0, m);
            double inner = 0.0;
            for (std::size_t h = 0; h <= m; ++h) inner += v[h] * psi(h, t1) * psi(h, t2);
            out.I += w[t1] * w[t2] * std::sqrt(Z[t1] * Z[t2]) * inner;
        }
    }
    const double I = out.I;

    for (std::size_t t = 0; t <= n; ++t) {
        double ito = 0.0;
        for (std::size_t h = 0; h < t; ++h) ito += psi(h, t) / I * path.dW_tilde[h];
        out.term_ito += T / k * w[t] * std::sqrt(Z[t]) * ito;
        if (t > 0) {
            const auto v = sub_weights(grid, 0, t);
            double inner = 0.0;
            for (std::size_t h = 0; h <= t; ++h) inner += v[h] * psi(h, t) / I * psi(h, t);
            out.term_trace += T / 2.0 * w[t] * inner;
        }
    }

    // D_h phi(t) = k q phi(t) int_h^t Z_s^{-3/2} psi_{h,s} ds
    auto d_phi_row = [&](std::size_t h) {
        std::vector<double> d(n + 1, 0.0);
        for (std::size_t t = h + 1; t <= n; ++t) {
            const auto v = sub_weights(grid, h, t);
            double s = 0.0;
            for (std::size_t u = h; u <= t; ++u) s += v[u] * std::pow(Z[u], -1.5) * psi(h, u);
            d[t] = k * q * phi[t] * s;
        }
        return d;
    };

    std::vector<std::vector<double>> dphi(n + 1);
    out.d_I.assign(n + 1, 0.0);
    for (std::size_t h = 0; h <= n; ++h) {
        dphi[h] = d_phi_row(h);
        std::vector<double> dg(n + 1, 0.0), dF(n + 1, 0.0);
        for (std::size_t a = h; a <= n; ++a) {
            dg[a] = 0.5 * k * psi(h, a) * phi[a] + std::sqrt(Z[a]) * dphi[h][a];
        }
        for (std::size_t c = h + 1; c <= n; ++c) {
            const auto v = sub_weights(grid, h, c);
            for (std::size_t u = h; u <= c; ++u) dF[c] += v[u] * (-2.0) * dphi[h][u] / (phi[u] * phi[u] * phi[u]);
        }
        const auto vh = sub_weights(grid, h, n);
        double s = 0.0;
        for (std::size_t a = 0; a <= n; ++a) {
            for (std::size_t b = 0; b <= n; ++b) {
                const std::size_t m = std::min(a, b);
                const double ga = std::sqrt(Z[a]) * phi[a], gb = std::sqrt(Z[b]) * phi[b];
                s += 2.0 * vh[a] * w[b] * dg[a] * gb * F[m];
                s += w[a] * w[b] * ga * gb * dF[m];
            }
        }
        out.d_I[h] = s;
    }

    // (T/k) int sqrt(Z_t) int_0^t D_h(phi(t)/I) phi(h)^{-1} dh dt
    for (std::size_t t = 1; t <= n; ++t) {
        const auto v = sub_weights(grid, 0, t);
        double inner = 0.0;
        for (std::size_t h = 0; h <= t; ++h) {
            const double d = dphi[h][t] / I - phi[t] * out.d_I[h] / (I * I);
            inner += v[h] * d / phi[h];
        }
        out.term_anticipating += T / k * w[t] * std::sqrt(Z[t]) * inner;
    }
    return out;
}

}  // namespace malvol::brute
