#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "malvol/model.hpp"
#include "malvol/noise.hpp"
#include "malvol/path.hpp"

namespace malvol {

struct EnsembleOptions {
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    bool antithetic = false;          ///< paths 2m and 2m+1 share noise with opposite sign
    unsigned threads = 0;             ///< 0 = machine parallelism
    bool winsorize = false;
    double winsorize_quantile = 1e-4;
};

struct PathSample {
    std::size_t path_index = 0;
    double avg_variance = 0.0;
    double weight = 0.0;
    double denominator = 0.0;  ///< G (OU) or I (CIR)
};

/// Failed paths are left out of `samples` and counted in `failures`.
struct EnsembleResult {
    ModelTag model = ModelTag::OU;
    std::vector<PathSample> samples;
    std::size_t n_paths = 0;
    std::size_t failures = 0;
    TimeGrid grid;
    std::uint64_t seed = 0;

    std::vector<double> avg_variances() const;
    std::vector<double> weights() const;
};

/// Guard failures tolerated per ensemble: floor(0.001 * n_paths).
std::size_t failure_budget(std::size_t n_paths) noexcept;

NoiseStream volatility_stream(const EnsembleOptions& opts, std::size_t path_index) noexcept;
NoiseStream asset_stream(const EnsembleOptions& opts, std::size_t path_index) noexcept;

/// Throws FailureBudgetExceeded when more paths fail than failure_budget allows,
/// EmptyEnsemble when n_paths == 0.
EnsembleResult run_ensemble(const ValidatedOUModel& model, const TimeGrid& grid,
                            const EnsembleOptions& opts);
EnsembleResult run_ensemble(const ValidatedCIRModel& model, const TimeGrid& grid,
                            const EnsembleOptions& opts);

/// Terminal state Y_T or Z_T per path (no weights).
std::vector<double> simulate_terminal_states(const ValidatedOUModel& model, const TimeGrid& grid,
                                             const EnsembleOptions& opts);
std::vector<double> simulate_terminal_states(const ValidatedCIRModel& model, const TimeGrid& grid,
                                             const EnsembleOptions& opts);

/// Clamps values to the [q, 1-q] empirical quantiles.
void winsorize(std::vector<double>& values, double q);

}  // namespace malvol
