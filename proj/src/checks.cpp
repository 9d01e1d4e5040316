#include "malvol/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "malvol/brute_force.hpp"
#include "malvol/commands.hpp"
#include "malvol/config.hpp"
#include "malvol/density.hpp"
#include "malvol/ensemble.hpp"
#include "malvol/error.hpp"
#include "malvol/malliavin_cir.hpp"
#include "malvol/malliavin_ou.hpp"
#include "malvol/stats.hpp"

namespace malvol {

namespace {

// Sample sizes. Every statistical criterion runs at the desk scale.
constexpr std::size_t kMomentPaths = 100000;
constexpr std::size_t kWeightPaths = 50000;
constexpr std::size_t kPricePaths = 50000;
constexpr std::size_t kMartingalePaths = 100000;
constexpr std::size_t kReproPaths = 2000;  // bit-equality does not depend on N
constexpr std::size_t kDensitySteps = 512;
constexpr std::size_t kPriceSteps = 256;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string z_text(const char* label, double diff, double se) {
    std::ostringstream s;
    s << label << " diff=" << fmt("%.3g", diff) << " se=" << fmt("%.3g", se) << " z=" << fmt("%.2f", diff / se);
    return s.str();
}

struct ZCheck {
    bool pass;
    std::string text;
};

// |mean(values) - target| < 3 se(values)
ZCheck within_3se(const char* label, std::span<const double> values, double target) {
    const auto s = summarize(values);
    const double se = s.se.value_or(0.0);
    return {std::abs(s.mean - target) < 3.0 * se, z_text(label, s.mean - target, se)};
}

struct Moments {
    double mean, se_mean, var, se_var;
};

Moments moments(std::span<const double> x) {
    const auto s = summarize(x);
    const double n = static_cast<double>(x.size());
    std::vector<double> d2(x.size()), d4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - s.mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    const double var = sample_variance(x);
    const double m4 = mean(d4);
    const double m2 = mean(d2);
    return {s.mean, *s.se, var, std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

ZCheck moment_check(const char* label, std::span<const double> x, double mean_true, double var_true) {
    const auto m = moments(x);
    const bool ok = std::abs(m.mean - mean_true) < 3.0 * m.se_mean && std::abs(m.var - var_true) < 3.0 * m.se_var;
    return {ok, std::string(label) + " " + z_text("mean", m.mean - mean_true, m.se_mean) + "; " +
                    z_text("var", m.var - var_true, m.se_var)};
}

ValidatedOUModel ou_of(const RunConfig& c) {
    return *validate_ou(c.ou, reference_vol_family(c.vol_c, c.vol_m)).model;
}
ValidatedCIRModel cir_of(const RunConfig& c) { return *validate_cir(c.cir, true).model; }

struct ModelRun {
    const char* label;
    RunConfig cfg;
    EnsembleResult ens;
    std::vector<double> F, w;
    double lower;
};

CheckResult combine(int id, std::string name, const std::vector<ZCheck>& parts) {
    CheckResult r{id, std::move(name), true, ""};
    for (const auto& p : parts) {
        r.pass = r.pass && p.pass;
        if (!r.detail.empty()) r.detail += " | ";
        r.detail += p.text;
    }
    return r;
}

ZCheck zero_mean(const ModelRun& m) { return within_3se(m.label, m.w, 0.0); }

std::vector<ZCheck> duality(const ModelRun& m) {
    std::vector<double> a(m.F.size()), b(m.F.size());
    for (std::size_t i = 0; i < m.F.size(); ++i) {
        a[i] = m.F[i] * m.w[i];
        b[i] = m.F[i] * m.F[i] * m.w[i] - 2.0 * m.F[i];
    }
    auto first = within_3se("F*delta-1", a, 1.0);
    auto second = within_3se("F^2*delta-2F", b, 0.0);
    first.text = std::string(m.label) + " " + first.text;
    second.text = std::string(m.label) + " " + second.text;
    return {first, second};
}

ZCheck normalization(const ModelRun& m) {
    const auto xs = auto_density_grid(m.F, m.lower);
    const auto d = estimate_density(xs, m.F, m.w);
    return {d.normalization >= 0.95 && d.normalization <= 1.05,
            std::string(m.label) + " mass=" + fmt("%.4f", d.normalization)};
}

ZCheck kde_agreement(const ModelRun& m) {
    // 23 points spanning the 0.5%..99.5% sample quantiles, 21 interior points compared.
    // Past the last sample the Malliavin SE is exactly 0 and the KDE SE rests on a few points.
    const auto xs = linear_grid(quantile(m.F, 0.005), quantile(m.F, 0.995), 23);
    const auto mal = estimate_density(xs, m.F, m.w);
    const auto kde = kde_density(m.F, xs);
    double worst = 0.0;
    bool ok = true;
    for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
        const double bound = 3.0 * (mal.se[j] + kde.se[j]);
        const double diff = std::abs(mal.p_hat[j] - kde.p_hat[j]);
        ok = ok && diff < bound;
        worst = std::max(worst, diff / bound);
    }
    return {ok, std::string(m.label) + " max |diff|/bound=" + fmt("%.3f", worst)};
}

ZCheck survival_consistency(const ModelRun& m) {
    // grid up to the sample maximum so the estimate vanishes past its end
    const double hi = *std::max_element(m.F.begin(), m.F.end());
    const auto xs = linear_grid(auto_density_grid(m.F, m.lower).front(), hi, 201);
    const auto pivot = quantile(m.F, 0.5);
    double worst = 0.0;
    bool ok = true;
    for (int q = 0; q < 10; ++q) {
        const double target = quantile(m.F, 0.05 + 0.1 * q);
        const std::size_t j = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), target) - xs.begin());
        std::vector<double> coeff(xs.size(), 0.0);
        // trapezoid on [x_j, max]
        for (std::size_t u = j; u + 1 < xs.size(); ++u) {
            const double h = xs[u + 1] - xs[u];
            coeff[u] += 0.5 * h;
            coeff[u + 1] += 0.5 * h;
        }
        std::vector<double> diff(m.F.size());
        double pivot_part = 0.0;
        for (std::size_t u = 0; u < xs.size(); ++u) {
            if (xs[u] < pivot) pivot_part += coeff[u];
        }
        for (std::size_t i = 0; i < m.F.size(); ++i) {
            double integral = 0.0;
            for (std::size_t u = 0; u < xs.size(); ++u) {
                if (m.F[i] > xs[u]) integral += coeff[u];
            }
            diff[i] = (integral - pivot_part) * m.w[i] - (m.F[i] > xs[j] ? 1.0 : 0.0);
        }
        const auto s = summarize(diff);
        const double r = std::abs(s.mean) / (3.0 * *s.se);
        ok = ok && r < 1.0;
        worst = std::max(worst, r);
    }
    return {ok, std::string(m.label) + " max |diff|/(3 se)=" + fmt("%.3f", worst)};
}

bool overlap(const PriceEstimate& a, const PriceEstimate& b) {
    return a.ci95.first <= b.ci95.second && b.ci95.first <= a.ci95.second;
}

ZCheck price_triangle(const char* label, const RunConfig& cfg, unsigned threads) {
    const auto run = run_price(cfg, threads);
    const auto& dq = run.rows[0];
    const auto& mix = run.rows[1];
    const auto& plain = run.rows[2];
    const double rel = std::abs(dq.value - mix.value) / mix.value;
    const bool ok = overlap(dq, mix) && overlap(dq, plain) && overlap(mix, plain) && rel < 0.02;
    std::ostringstream s;
    s << label << " dq=" << fmt("%.4f", dq.value) << "(" << fmt("%.3f", dq.std_error) << ")"
      << " mix=" << fmt("%.4f", mix.value) << "(" << fmt("%.3f", mix.std_error) << ")"
      << " plain=" << fmt("%.4f", plain.value) << "(" << fmt("%.3f", plain.std_error) << ")"
      << " |dq-mix|/mix=" << fmt("%.4f", rel);
    return {ok, s.str()};
}

CheckResult brute_force_check() {
    const auto grid = make_grid(1.0, 64);
    const auto ou = reference_ou_config();
    const auto cir = reference_cir_config();
    const auto vol = reference_vol_family(ou.vol_c, ou.vol_m);
    double worst = 0.0;
    auto rel = [&](double fast, double slow) {
        worst = std::max(worst, std::abs(fast - slow) / std::max(std::abs(slow), 1e-300));
    };
    for (std::uint64_t p = 0; p < 5; ++p) {
        std::vector<double> z(grid.n_steps);
        NoiseStream(777, p, StreamPurpose::Volatility).fill_normals(z);

        const auto op = simulate_ou_path(ou.ou, vol, grid, z);
        const auto ok = compute_ou_kernel(op, ou.ou, vol);
        const auto ow = compute_weight_ou(op, ok);
        const auto ob = brute::ou_terms(op, ou.ou, vol);
        const auto C = brute::C_of_h(ou.ou.alpha, grid, ok.nu_vals, ok.nu_prime_vals);
        rel(ok.G, ob.G);
        rel(ow.term_ito, ob.term_ito);
        rel(ow.term_trace, ob.term_trace);
        const double c_scale = *std::max_element(C.begin(), C.end());
        for (std::size_t j = 0; j < C.size(); ++j) {
            worst = std::max(worst, std::abs(ok.C_of_h[j] - C[j]) / c_scale);
        }

        const auto cp = simulate_cir_path(cir.cir, grid, z);
        const auto ck = compute_cir_kernel(cp, cir.cir);
        const auto cw = compute_weight_cir(cp, ck);
        const auto cb = brute::cir_terms(cp, cir.cir);
        rel(ck.I, cb.I);
        rel(cw.term_ito, cb.term_ito);
        rel(cw.term_trace, cb.term_trace);
        rel(cw.term_anticipating, cb.term_anticipating);
    }
    return {12, "brute-force kernel oracles", worst < 1e-8, "max rel err=" + fmt("%.2e", worst) + " over 5 paths, n=64"};
}

CheckResult reproducibility(std::uint64_t seed) {
    bool ok = true;
    std::string detail;
    for (auto cfg : {reference_ou_config(), reference_cir_config()}) {
        cfg.ensemble.n_paths = kReproPaths;
        cfg.ensemble.seed = seed;
        std::string first_density, first_prices;
        for (unsigned threads : {1U, 4U, 8U}) {
            const auto d = run_density(cfg, threads);
            const auto p = run_price(cfg, threads);
            const std::string dens = density_table(d, OutputFormat::Csv) + weights_table(d, OutputFormat::Csv);
            const std::string prices = prices_table(p, OutputFormat::Csv);
            if (threads == 1) {
                first_density = dens;
                first_prices = prices;
            } else if (dens != first_density || prices != first_prices) {
                ok = false;
            }
        }
        if (!detail.empty()) detail += " | ";
        detail += std::string(cfg.model == ModelTag::OU ? "OU" : "CIR") + (ok ? " identical" : " differs");
    }
    return {13, "reproducibility across 1/4/8 threads", ok, detail + " (N=2000)"};
}

CheckResult bs_shape(NormalCdf cdf) {
    const Contract c{100.0, 1.0};
    const double lower = 100.0 - 100.0 * std::exp(-0.05);
    // below ~0.02 the price equals its sigma = 0 limit to machine precision
    double prev = bs_conditional(0.0, c, 100.0, 0.05, cdf).discounted;
    bool ok = std::abs(prev - lower) < 1e-12;
    for (int i = 2; i <= 100; ++i) {
        const double sigma = 0.01 * i;
        const double v = bs_conditional(sigma, c, 100.0, 0.05, cdf).discounted;
        ok = ok && v > prev && v >= lower && v <= 100.0;
        prev = v;
    }
    return {14, "Black-Scholes monotone in sigma and within bounds", ok, "sigma = 0 and 0.02..1.00"};
}

}  // namespace

std::vector<CheckResult> run_battery(const BatteryOptions& opts) {
    std::vector<CheckResult> out;
    const unsigned th = opts.threads;

    auto ou_cfg = reference_ou_config();
    auto cir_cfg = reference_cir_config();
    ou_cfg.ensemble.seed = cir_cfg.ensemble.seed = opts.seed;
    const auto ou = ou_of(ou_cfg);
    const auto cir = cir_of(cir_cfg);
    const auto dgrid = make_grid(1.0, kDensitySteps);

    // 1, 2: terminal-state moments
    {
        const EnsembleOptions e{kMomentPaths, opts.seed, false, th, false, 1e-4};
        const auto& p = ou_cfg.ou;
        const double T = p.T;
        const auto y = simulate_terminal_states(ou, dgrid, e);
        out.push_back(combine(1, "OU terminal moments",
                              {moment_check("Y_T", y, p.y0 * std::exp(-p.alpha * T),
                                            p.k_ou * p.k_ou / (2.0 * p.alpha) * (1.0 - std::exp(-2.0 * p.alpha * T)))}));
        const auto& c = cir_cfg.cir;
        const auto z = simulate_terminal_states(cir, dgrid, e);
        const double e1 = std::exp(-T), e2 = std::exp(-2.0 * T);
        const double k2 = c.k_cir * c.k_cir;
        out.push_back(combine(2, "CIR terminal moments",
                              {moment_check("Z_T", z, c.z0 * e1 + c.b * (1.0 - e1),
                                            c.z0 * k2 * (e1 - e2) + 0.5 * c.b * k2 * (1.0 - e1) * (1.0 - e1))}));
    }

    // weight ensembles shared by 3-7 and 11
    std::vector<ModelRun> runs;
    {
        const EnsembleOptions e{kWeightPaths, opts.seed, false, th, false, 1e-4};
        ModelRun o{"OU", ou_cfg, run_ensemble(ou, dgrid, e), {}, {}, ou_cfg.vol_c * ou_cfg.vol_c};
        ModelRun c{"CIR", cir_cfg, run_ensemble(cir, dgrid, e), {}, {}, 0.0};
        for (ModelRun* m : {&o, &c}) {
            m->F = m->ens.avg_variances();
            m->w = m->ens.weights();
        }
        runs.push_back(std::move(o));
        runs.push_back(std::move(c));
    }
    const ModelRun& mo = runs[0];
    const ModelRun& mc = runs[1];

    out.push_back(combine(3, "zero-mean weights", {zero_mean(mo), zero_mean(mc)}));
    {
        auto parts = duality(mo);
        const auto more = duality(mc);
        parts.insert(parts.end(), more.begin(), more.end());
        out.push_back(combine(4, "duality identities", parts));
    }
    out.push_back(combine(5, "density normalization", {normalization(mo), normalization(mc)}));
    out.push_back(combine(6, "Malliavin density vs KDE", {kde_agreement(mo), kde_agreement(mc)}));
    out.push_back(combine(7, "density vs empirical survival", {survival_consistency(mo), survival_consistency(mc)}));

    // 8: price triangle
    {
        auto o = ou_cfg, c = cir_cfg;
        o.ensemble.n_paths = c.ensemble.n_paths = kPricePaths;
        o.n_steps = c.n_steps = kPriceSteps;
        out.push_back(combine(8, "price triangle", {price_triangle("OU", o, th), price_triangle("CIR", c, th)}));
    }

    // 9: constant averaged volatility
    {
        const std::vector<double> sigma(kPricePaths, 0.2);
        const Contract contract{100.0, 1.0};
        const auto p = price_mixing(sigma, contract, 100.0, 0.05, opts.cdf);
        const double err = std::abs(p.value - kBlackScholesOracle);
        out.push_back({9, "deterministic-vol mixing price", err < 1e-9 && p.std_error == 0.0,
                       "price=" + format_double(p.value) + " |err|=" + fmt("%.2e", err)});
    }

    // 10: martingale
    {
        const EnsembleOptions e{kMartingalePaths, opts.seed, false, th, false, 1e-4};
        const auto pgrid = make_grid(1.0, kPriceSteps);
        const Contract contract{100.0, 1.0};
        const auto po = price_plain_mc(ou, contract, pgrid, e).martingale;
        const auto pc = price_plain_mc(cir, contract, pgrid, e).martingale;
        out.push_back(combine(10, "martingale check",
                              {{std::abs(po.value - 100.0) < 3.0 * po.std_error, "OU " + z_text("S", po.value - 100.0, po.std_error)},
                               {std::abs(pc.value - 100.0) < 3.0 * pc.std_error, "CIR " + z_text("S", pc.value - 100.0, pc.std_error)}}));
    }

    // 11: positivity guards
    {
        const bool ok = mo.ens.failures == 0 && mc.ens.failures == 0;
        out.push_back({11, "positivity guards", ok,
                       "OU failures=" + std::to_string(mo.ens.failures) + " CIR failures=" + std::to_string(mc.ens.failures) +
                           " over " + std::to_string(kWeightPaths) + " paths each"});
    }

    out.push_back(brute_force_check());
    out.push_back(reproducibility(opts.seed));
    out.push_back(bs_shape(opts.cdf));
    return out;
}

void print_results(std::ostream& out, const std::vector<CheckResult>& results) {
    for (const auto& r : results) {
        char head[16];
        std::snprintf(head, sizeof head, "%2d", r.id);
        out << (r.pass ? "PASS" : "FAIL") << "  " << head << "  " << r.name << "  [" << r.detail << "]\n";
    }
}

int cmd_selfcheck(const BatteryOptions& opts, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<CheckResult> results;
    try {
        results = run_battery(opts);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitSelfcheckFailed;
    }
    print_results(out, results);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool all = std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
    out << (all ? "ALL PASS" : "SOME CHECKS FAILED") << " (" << fmt("%.1f", secs) << " s)\n";
    return all ? kExitOk : kExitSelfcheckFailed;
}

}  // namespace malvol
