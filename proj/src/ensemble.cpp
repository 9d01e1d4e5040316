#include "malvol/ensemble.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "malvol/error.hpp"
#include "malvol/malliavin_cir.hpp"
#include "malvol/malliavin_ou.hpp"
#include "malvol/parallel.hpp"
#include "malvol/stats.hpp"

namespace malvol {

std::vector<double> EnsembleResult::avg_variances() const {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].avg_variance;
    return out;
}

std::vector<double> EnsembleResult::weights() const {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].weight;
    return out;
}

std::size_t failure_budget(std::size_t n_paths) noexcept { return n_paths / 1000; }

NoiseStream volatility_stream(const EnsembleOptions& opts, std::size_t p) noexcept {
    if (opts.antithetic) return NoiseStream(opts.seed, p / 2, StreamPurpose::Volatility, p % 2 == 1);
    return NoiseStream(opts.seed, p, StreamPurpose::Volatility);
}

NoiseStream asset_stream(const EnsembleOptions& opts, std::size_t p) noexcept {
    if (opts.antithetic) return NoiseStream(opts.seed, p / 2, StreamPurpose::Asset, p % 2 == 1);
    return NoiseStream(opts.seed, p, StreamPurpose::Asset);
}

void winsorize(std::vector<double>& values, double q) {
    if (values.empty()) return;
    if (!(q >= 0.0 && q < 0.5)) throw Error(ErrorCode::InvalidArgument, "winsorize quantile must be in [0, 0.5)");
    const double lo = quantile(values, q);
    const double hi = quantile(values, 1.0 - q);
    for (double& v : values) v = std::clamp(v, lo, hi);
}

namespace {

bool is_path_guard(ErrorCode c) noexcept {
    return c == ErrorCode::NonPositiveDenominator || c == ErrorCode::Overflow ||
           c == ErrorCode::FloorSaturation || c == ErrorCode::HypothesisViolation;
}

template <class PerPath>
EnsembleResult run(ModelTag tag, const TimeGrid& grid, const EnsembleOptions& opts, PerPath per_path) {
    if (opts.n_paths == 0) throw Error(ErrorCode::EmptyEnsemble, "ensemble needs at least one path");
    std::vector<std::optional<PathSample>> slots(opts.n_paths);
    parallel_for(opts.n_paths, opts.threads, [&](std::size_t p) {
        try {
            slots[p] = per_path(p);
        } catch (const Error& e) {
            if (!is_path_guard(e.code())) throw;
        }
    });

    EnsembleResult res;
    res.model = tag;
    res.n_paths = opts.n_paths;
    res.grid = grid;
    res.seed = opts.seed;
    res.samples.reserve(opts.n_paths);
    for (auto& s : slots) {
        if (s) res.samples.push_back(*s);
        else ++res.failures;
    }
    if (res.failures > failure_budget(opts.n_paths)) {
        throw Error(ErrorCode::FailureBudgetExceeded,
                    std::to_string(res.failures) + " of " + std::to_string(opts.n_paths) +
                        " paths failed runtime guards (budget " +
                        std::to_string(failure_budget(opts.n_paths)) + ")");
    }
    if (res.samples.empty()) throw Error(ErrorCode::EmptyEnsemble, "every path failed");
    if (opts.winsorize) {
        auto w = res.weights();
        winsorize(w, opts.winsorize_quantile);
        for (std::size_t i = 0; i < w.size(); ++i) res.samples[i].weight = w[i];
    }
    return res;
}

}  // namespace

EnsembleResult run_ensemble(const ValidatedOUModel& model, const TimeGrid& grid,
                            const EnsembleOptions& opts) {
    return run(ModelTag::OU, grid, opts, [&](std::size_t p) {
        const auto path = simulate_ou_path(model, grid, volatility_stream(opts, p));
        const auto w = ou_weight(path, model);
        return PathSample{p, path.avg_variance, w.delta_bar, w.G};
    });
}

EnsembleResult run_ensemble(const ValidatedCIRModel& model, const TimeGrid& grid,
                            const EnsembleOptions& opts) {
    return run(ModelTag::CIR, grid, opts, [&](std::size_t p) {
        const auto path = simulate_cir_path(model, grid, volatility_stream(opts, p));
        const auto w = cir_weight(path, model);
        return PathSample{p, path.avg_variance, w.delta_tilde, w.I};
    });
}

std::vector<double> simulate_terminal_states(const ValidatedOUModel& model, const TimeGrid& grid,
                                             const EnsembleOptions& opts) {
    std::vector<double> out(opts.n_paths);
    parallel_for(opts.n_paths, opts.threads, [&](std::size_t p) {
        out[p] = simulate_ou_path(model, grid, volatility_stream(opts, p)).states.back();
    });
    return out;
}

std::vector<double> simulate_terminal_states(const ValidatedCIRModel& model, const TimeGrid& grid,
                                             const EnsembleOptions& opts) {
    std::vector<double> out(opts.n_paths);
    parallel_for(opts.n_paths, opts.threads, [&](std::size_t p) {
        out[p] = simulate_cir_path(model, grid, volatility_stream(opts, p)).states.back();
    });
    return out;
}

}  // namespace malvol
