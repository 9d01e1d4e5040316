#include "malvol/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "malvol/error.hpp"

namespace malvol {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

const json& child(const json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = child(j, key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

bool flag_or(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) fail(std::string("field '") + key + "' must be true or false");
    return j.at(key).get<bool>();
}

std::uint64_t unsigned_int(const json& j, const char* key) {
    const json& v = child(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        fail(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

const json& object(const json& j, const char* key) {
    const json& v = child(j, key);
    if (!v.is_object()) fail(std::string("field '") + key + "' must be an object");
    return v;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("config must be a JSON object");

    RunConfig cfg;
    const json& model = child(doc, "model");
    if (!model.is_string()) fail("field 'model' must be \"ou\" or \"cir\"");
    const auto name = model.get<std::string>();
    if (name == "ou") cfg.model = ModelTag::OU;
    else if (name == "cir") cfg.model = ModelTag::CIR;
    else fail("unknown model '" + name + "'");

    const json& grid = object(doc, "grid");
    cfg.maturity = number(grid, "T");
    if (grid.contains("n_steps")) cfg.n_steps = unsigned_int(grid, "n_steps");

    const json& p = object(doc, "params");
    if (cfg.model == ModelTag::OU) {
        cfg.ou = {number(p, "alpha"), number(p, "k"), number_or(p, "y0", 0.0), number(p, "s0"),
                  number(p, "r"), number_or(p, "mu", 0.0), cfg.maturity};
        const json& vol = object(doc, "vol_family");
        const json& vname = child(vol, "name");
        if (!vname.is_string()) fail("field 'name' must be a string");
        cfg.vol_name = vname.get<std::string>();
        if (cfg.vol_name != "reference") fail("unknown vol family '" + cfg.vol_name + "'");
        cfg.vol_c = number(vol, "c");
        cfg.vol_m = number(vol, "m");
    } else {
        cfg.cir = {number(p, "b"), number(p, "k"), number(p, "z0"), number(p, "s0"),
                   number(p, "r"), number_or(p, "mu", 0.0), cfg.maturity};
        cfg.density_mode = flag_or(doc, "density_mode", true);
    }

    const json& ens = object(doc, "ensemble");
    cfg.ensemble.n_paths = unsigned_int(ens, "n_paths");
    cfg.ensemble.seed = ens.contains("seed") ? unsigned_int(ens, "seed") : 0;
    cfg.ensemble.antithetic = flag_or(ens, "antithetic", false);
    cfg.ensemble.winsorize = flag_or(ens, "winsorize", false);
    cfg.ensemble.winsorize_quantile = number_or(ens, "winsorize_quantile", 1e-4);
    if (cfg.ensemble.n_paths == 0) fail("ensemble.n_paths must be positive");
    if (!(cfg.ensemble.winsorize_quantile >= 0.0 && cfg.ensemble.winsorize_quantile < 0.5)) {
        fail("ensemble.winsorize_quantile must be in [0, 0.5)");
    }

    cfg.strike = number(object(doc, "contract"), "strike");

    if (doc.contains("density")) {
        const json& d = object(doc, "density");
        if (d.contains("x_grid")) {
            const json& g = d.at("x_grid");
            if (g.is_string() && g.get<std::string>() == "auto") {
                cfg.x_grid.automatic = true;
            } else if (g.is_object()) {
                cfg.x_grid.automatic = false;
                cfg.x_grid.min = number(g, "min");
                cfg.x_grid.max = number(g, "max");
                cfg.x_grid.points = unsigned_int(g, "points");
                if (cfg.x_grid.points < 2 || !(cfg.x_grid.max > cfg.x_grid.min) || cfg.x_grid.min < 0.0) {
                    fail("density.x_grid needs 0 <= min < max and points >= 2");
                }
            } else {
                fail("density.x_grid must be \"auto\" or {min, max, points}");
            }
        }
        cfg.centering = flag_or(d, "centering", true);
    }

    if (doc.contains("output")) {
        const json& o = object(doc, "output");
        if (o.contains("directory")) {
            if (!o.at("directory").is_string()) fail("output.directory must be a string");
            cfg.output_dir = o.at("directory").get<std::string>();
        }
        if (o.contains("format")) {
            const json& f = o.at("format");
            if (f == "csv") cfg.format = OutputFormat::Csv;
            else if (f == "json") cfg.format = OutputFormat::Json;
            else fail("output.format must be \"csv\" or \"json\"");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> config_violations(const RunConfig& cfg) {
    std::vector<Violation> found;
    if (cfg.model == ModelTag::OU) {
        if (!(cfg.vol_c > 0.0) || !(cfg.vol_m > 0.0)) {
            // the family cannot be built; report what we can about the rest
            if (!(cfg.vol_c > 0.0)) found.push_back(Violation::NonPositiveLowerBound);
            if (!(cfg.vol_m > 0.0)) found.push_back(Violation::NonPositiveSigmaPrime);
            const auto rest = validate_ou(cfg.ou, reference_vol_family(1.0, 1.0)).violations;
            found.insert(found.end(), rest.begin(), rest.end());
        } else {
            const auto v = validate_ou(cfg.ou, reference_vol_family(cfg.vol_c, cfg.vol_m));
            found = v.violations;
        }
    } else {
        found = validate_cir(cfg.cir, cfg.density_mode).violations;
    }
    for (Violation v : validate_contract(cfg.contract())) found.push_back(v);

    std::vector<std::string> lines;
    for (Violation v : found) {
        auto line = violation_line(v);
        if (std::find(lines.begin(), lines.end(), line) == lines.end()) lines.push_back(std::move(line));
    }
    if (cfg.n_steps && *cfg.n_steps < 2) lines.emplace_back("E_INVALID_GRID n_steps < 2");
    return lines;
}

RunConfig reference_ou_config() {
    RunConfig cfg;
    cfg.model = ModelTag::OU;
    cfg.ou = {1.0, 0.5, 0.0, 100.0, 0.05, 0.05, 1.0};
    cfg.vol_c = 0.1;
    cfg.vol_m = 0.1;
    cfg.maturity = 1.0;
    cfg.ensemble.n_paths = 50000;
    cfg.ensemble.seed = 20240601;
    cfg.strike = 100.0;
    return cfg;
}

RunConfig reference_cir_config() {
    RunConfig cfg;
    cfg.model = ModelTag::CIR;
    cfg.cir = {1.0, 0.25, 1.0, 100.0, 0.05, 0.05, 1.0};
    cfg.maturity = 1.0;
    cfg.ensemble.n_paths = 50000;
    cfg.ensemble.seed = 20240601;
    cfg.strike = 100.0;
    return cfg;
}

}  // namespace malvol
