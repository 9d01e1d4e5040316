#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "malvol/config.hpp"
#include "malvol/density.hpp"
#include "malvol/ensemble.hpp"
#include "malvol/pricing.hpp"

namespace malvol {

enum ExitCode : int {
    kExitOk = 0,
    kExitSelfcheckFailed = 1,
    kExitInvalid = 2,
    kExitIo = 3,
    kExitBudget = 4,
};

struct CliOptions {
    std::string config_path;
    std::optional<std::string> out_dir;   ///< overrides output.directory
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;    ///< overrides ensemble.seed
};

inline constexpr std::size_t kLowSampleThreshold = 1000;

struct DensityRun {
    EnsembleResult ensemble;
    DensityEstimate malliavin;
    std::optional<DensityEstimate> kde;  ///< absent below 100 samples
    double mean_weight = 0.0;
    double duality = 0.0;                ///< mean(F * delta), 1 in theory
};

struct PriceRun {
    std::vector<PriceEstimate> rows;  ///< density_quadrature, mixing_mc, plain_mc, martingale_check
    std::size_t failures = 0;
};

/// The config must already be free of violations.
DensityRun run_density(const RunConfig& cfg, unsigned threads);
PriceRun run_price(const RunConfig& cfg, unsigned threads);

/// File contents, 17 significant digits, one header row (csv) or an array of records (json).
std::string density_table(const DensityRun& run, OutputFormat format);
std::string weights_table(const DensityRun& run, OutputFormat format);
std::string prices_table(const PriceRun& run, OutputFormat format);

/// "%.17g"
std::string format_double(double v);

int cmd_validate(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_density(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_price(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace malvol
