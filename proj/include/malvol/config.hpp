#pragma once
// JSON run configuration.
//
// {
//   "model": "ou" | "cir",
//   "params": {"alpha":1, "k":0.5, "y0":0, "s0":100, "r":0.05, "mu":0.05}     (ou)
//             {"b":1, "k":0.25, "z0":1, "s0":100, "r":0.05, "mu":0.05}       (cir)
//   "vol_family": {"name":"reference", "c":0.1, "m":0.1},                     (ou only)
//   "grid": {"T":1, "n_steps":512},             n_steps optional: 512 density, 256 price
//   "ensemble": {"n_paths":50000, "seed":1, "antithetic":false,
//                "winsorize":false, "winsorize_quantile":1e-4},
//   "contract": {"strike":100},
//   "density": {"x_grid":"auto" | {"min":..,"max":..,"points":41}, "centering":true},
//   "density_mode": true,                       (cir only)
//   "output": {"directory":"out", "format":"csv" | "json"}
// }

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "malvol/ensemble.hpp"
#include "malvol/model.hpp"

namespace malvol {

enum class OutputFormat { Csv, Json };

struct GridSpec {
    bool automatic = true;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 41;
};

struct RunConfig {
    ModelTag model = ModelTag::OU;
    OUParams ou;
    CIRParams cir;
    std::string vol_name = "reference";
    double vol_c = 0.0;
    double vol_m = 0.0;
    double maturity = 1.0;
    std::optional<std::size_t> n_steps;
    EnsembleOptions ensemble;
    double strike = 0.0;
    GridSpec x_grid;
    bool centering = true;
    bool density_mode = true;
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::Csv;

    double s0() const noexcept { return model == ModelTag::OU ? ou.s0 : cir.s0; }
    double r() const noexcept { return model == ModelTag::OU ? ou.r : cir.r; }
    Contract contract() const noexcept { return {strike, maturity}; }
};

inline constexpr std::size_t kDefaultDensitySteps = 512;
inline constexpr std::size_t kDefaultPriceSteps = 256;

/// Throws Error(ConfigError) on malformed JSON, missing fields or wrong types.
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a file; unreadable files raise ConfigError too.
RunConfig load_config(const std::string& path);

/// Model validation outcome for a parsed config: one line per violation,
/// empty when the config is usable.
std::vector<std::string> config_violations(const RunConfig& cfg);

/// Built-in reference configurations.
RunConfig reference_ou_config();
RunConfig reference_cir_config();

}  // namespace malvol
