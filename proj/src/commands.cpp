#include "malvol/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "malvol/error.hpp"
#include "malvol/stats.hpp"

namespace malvol {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct LoadedConfig {
    RunConfig cfg;
    int exit_code = kExitOk;
};

// parse, apply overrides and validate; prints diagnostics
LoadedConfig load(const CliOptions& opts, std::ostream& out, std::ostream& err, bool quiet_valid) {
    LoadedConfig res;
    try {
        res.cfg = load_config(opts.config_path);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        res.exit_code = kExitIo;
        return res;
    }
    if (opts.seed) res.cfg.ensemble.seed = *opts.seed;
    if (opts.out_dir) res.cfg.output_dir = *opts.out_dir;
    res.cfg.ensemble.threads = opts.threads;
    const auto lines = config_violations(res.cfg);
    if (!lines.empty()) {
        for (const auto& l : lines) out << l << '\n';
        res.exit_code = kExitInvalid;
    } else if (!quiet_valid) {
        out << "VALID\n";
    }
    return res;
}

TimeGrid grid_for(const RunConfig& cfg, std::size_t fallback) {
    return make_grid(cfg.maturity, cfg.n_steps.value_or(fallback));
}

double lower_support(const RunConfig& cfg) {
    return cfg.model == ModelTag::OU ? cfg.vol_c * cfg.vol_c : 0.0;
}

std::vector<double> x_grid_for(const RunConfig& cfg, std::span<const double> F, bool pricing) {
    if (!cfg.x_grid.automatic) return linear_grid(cfg.x_grid.min, cfg.x_grid.max, cfg.x_grid.points);
    return auto_density_grid(F, lower_support(cfg), cfg.x_grid.points, pricing);
}

ValidatedOUModel ou_model(const RunConfig& cfg) {
    auto v = validate_ou(cfg.ou, reference_vol_family(cfg.vol_c, cfg.vol_m));
    if (!v.ok()) throw Error(ErrorCode::HypothesisViolation, "OU config does not validate");
    return *v.model;
}

ValidatedCIRModel cir_model(const RunConfig& cfg) {
    auto v = validate_cir(cfg.cir, cfg.density_mode);
    if (!v.ok()) throw Error(ErrorCode::HypothesisViolation, "CIR config does not validate");
    return *v.model;
}

EnsembleResult ensemble_for(const RunConfig& cfg, const TimeGrid& grid, unsigned threads) {
    EnsembleOptions opts = cfg.ensemble;
    opts.threads = threads;
    if (cfg.model == ModelTag::OU) return run_ensemble(ou_model(cfg), grid, opts);
    return run_ensemble(cir_model(cfg), grid, opts);
}

// A table is a header plus rows of doubles; strings only in the first column when `labels` is set.
std::string render(const std::vector<std::string>& header, const std::vector<std::string>& labels,
                   const std::vector<std::vector<double>>& rows, OutputFormat format) {
    std::string s;
    if (format == OutputFormat::Csv) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c) s += ',';
            s += header[c];
        }
        s += '\n';
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::size_t c = 0;
            if (!labels.empty()) {
                s += labels[r];
                ++c;
            }
            for (double v : rows[r]) {
                if (c++) s += ',';
                s += format_double(v);
            }
            s += '\n';
        }
        return s;
    }
    ordered_json arr = ordered_json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        ordered_json rec = ordered_json::object();
        std::size_t c = 0;
        if (!labels.empty()) rec[header[c++]] = labels[r];
        for (double v : rows[r]) {
            if (std::isfinite(v)) rec[header[c]] = v;
            else rec[header[c]] = nullptr;
            ++c;
        }
        arr.push_back(std::move(rec));
    }
    return arr.dump(2) + "\n";
}

std::string extension(OutputFormat f) { return f == OutputFormat::Csv ? ".csv" : ".json"; }

// All files are rendered before anything is written.
int write_files(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& files,
                std::ostream& err) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create output directory '" << dir << "': " << ec.message() << '\n';
        return kExitIo;
    }
    for (const auto& [name, body] : files) {
        const fs::path path = fs::path(dir) / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << body;
        if (!f) {
            err << "error: cannot write '" << path.string() << "'\n";
            return kExitIo;
        }
    }
    return kExitOk;
}

template <class Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        if (e.code() == ErrorCode::FailureBudgetExceeded) return kExitBudget;
        if (e.code() == ErrorCode::ConfigError) return kExitIo;
        return kExitInvalid;
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

DensityRun run_density(const RunConfig& cfg, unsigned threads) {
    const auto grid = grid_for(cfg, kDefaultDensitySteps);
    DensityRun run;
    run.ensemble = ensemble_for(cfg, grid, threads);
    const auto F = run.ensemble.avg_variances();
    const auto w = run.ensemble.weights();
    const auto xs = x_grid_for(cfg, F, false);
    run.malliavin = estimate_density(xs, F, w, cfg.centering);
    if (F.size() >= 100) run.kde = kde_density(F, xs);
    run.mean_weight = mean(w);
    std::vector<double> fw(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) fw[i] = F[i] * w[i];
    run.duality = mean(fw);
    return run;
}

PriceRun run_price(const RunConfig& cfg, unsigned threads) {
    const auto grid = grid_for(cfg, kDefaultPriceSteps);
    const auto ens = ensemble_for(cfg, grid, threads);
    const auto F = ens.avg_variances();
    const auto w = ens.weights();
    const Contract contract = cfg.contract();

    std::vector<double> sigma(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) sigma[i] = std::sqrt(F[i]);

    const auto density = estimate_density(x_grid_for(cfg, F, true), F, w, cfg.centering);
    PriceRun run;
    run.rows.push_back(price_from_density(density, F, w, contract, cfg.s0(), cfg.r()));
    run.rows.push_back(price_mixing(sigma, contract, cfg.s0(), cfg.r()));

    EnsembleOptions opts = cfg.ensemble;
    opts.threads = threads;
    const auto plain = cfg.model == ModelTag::OU ? price_plain_mc(ou_model(cfg), contract, grid, opts)
                                                 : price_plain_mc(cir_model(cfg), contract, grid, opts);
    run.rows.push_back(plain.price);
    run.rows.push_back(plain.martingale);
    run.failures = ens.failures + plain.failures;
    return run;
}

std::string density_table(const DensityRun& run, OutputFormat format) {
    const auto& m = run.malliavin;
    const double nan = std::nan("");
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < m.x.size(); ++j) {
        rows.push_back({m.x[j], m.p_hat[j], m.se[j], run.kde ? run.kde->p_hat[j] : nan,
                        run.kde ? run.kde->se[j] : nan});
    }
    return render({"x", "p_malliavin", "se_malliavin", "p_kde", "se_kde"}, {}, rows, format);
}

std::string weights_table(const DensityRun& run, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        // path_index stays an integer
        std::string out = "path_index,avg_variance,weight,denominator\n";
        for (const auto& s : run.ensemble.samples) {
            out += std::to_string(s.path_index) + ',' + format_double(s.avg_variance) + ',' +
                   format_double(s.weight) + ',' + format_double(s.denominator) + '\n';
        }
        return out;
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(run.ensemble.samples.size());
    for (const auto& s : run.ensemble.samples) {
        rows.push_back({static_cast<double>(s.path_index), s.avg_variance, s.weight, s.denominator});
    }
    return render({"path_index", "avg_variance", "weight", "denominator"}, {}, rows, format);
}

std::string prices_table(const PriceRun& run, OutputFormat format) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    for (const auto& p : run.rows) {
        labels.emplace_back(to_string(p.method));
        rows.push_back({p.value, p.std_error, p.ci95.first, p.ci95.second});
    }
    return render({"method", "value", "se", "ci_lo", "ci_hi"}, labels, rows, format);
}

int cmd_validate(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    return load(opts, out, err, false).exit_code;
}

int cmd_density(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    auto loaded = load(opts, out, err, true);
    if (loaded.exit_code != kExitOk) return loaded.exit_code;
    const RunConfig& cfg = loaded.cfg;
    return guarded(err, [&] {
        if (cfg.ensemble.n_paths < kLowSampleThreshold) {
            err << "LOW_SAMPLE n_paths=" << cfg.ensemble.n_paths << " < " << kLowSampleThreshold << '\n';
        }
        err << "stage: ensemble and density\n";
        const auto run = run_density(cfg, opts.threads);
        const auto ext = extension(cfg.format);
        const int rc = write_files(cfg.output_dir,
                                   {{"density" + ext, density_table(run, cfg.format)},
                                    {"weights" + ext, weights_table(run, cfg.format)}},
                                   err);
        if (rc != kExitOk) return rc;
        out << "normalization=" << format_double(run.malliavin.normalization)
            << " mean_weight=" << format_double(run.mean_weight)
            << " duality_mean_F_delta=" << format_double(run.duality)
            << " paths=" << run.ensemble.samples.size() << " failures=" << run.ensemble.failures << '\n';
        return static_cast<int>(kExitOk);
    });
}

int cmd_price(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    auto loaded = load(opts, out, err, true);
    if (loaded.exit_code != kExitOk) return loaded.exit_code;
    const RunConfig& cfg = loaded.cfg;
    return guarded(err, [&] {
        if (cfg.ensemble.n_paths < kLowSampleThreshold) {
            err << "LOW_SAMPLE n_paths=" << cfg.ensemble.n_paths << " < " << kLowSampleThreshold << '\n';
        }
        err << "stage: pricing\n";
        const auto run = run_price(cfg, opts.threads);
        for (const auto& p : run.rows) {
            if (p.warning) err << *p.warning << '\n';
        }
        const int rc = write_files(cfg.output_dir,
                                   {{"prices" + extension(cfg.format), prices_table(run, cfg.format)}}, err);
        if (rc != kExitOk) return rc;
        for (const auto& p : run.rows) {
            out << to_string(p.method) << ' ' << format_double(p.value) << " +- " << format_double(p.std_error)
                << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

}  // namespace malvol
