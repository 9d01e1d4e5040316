// malvol: density of averaged variance and option prices from the command line.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "malvol/checks.hpp"
#include "malvol/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo density of averaged variance (OU and CIR volatility) and European call prices"};
    app.require_subcommand(1);

    malvol::CliOptions opts;
    std::string out_dir;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", opts.config_path, "JSON run configuration");
        if (needs_config) cfg->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--threads", opts.threads, "worker threads, 0 = all cores")->default_val(0);
        sub->add_option("--seed", seed, "random seed (overrides ensemble.seed)");
    };

    auto* validate = app.add_subcommand("validate", "check a configuration against the model assumptions");
    auto* density = app.add_subcommand("density", "estimate the density of the averaged variance");
    auto* price = app.add_subcommand("price", "price a European call three ways");
    auto* selfcheck = app.add_subcommand("selfcheck", "run the acceptance battery");
    add_common(validate, true);
    add_common(density, true);
    add_common(price, true);
    add_common(selfcheck, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : malvol::kExitIo;
    }

    for (auto* sub : {validate, density, price, selfcheck}) {
        if (sub->count("--out")) opts.out_dir = out_dir;
        if (sub->count("--seed")) opts.seed = seed;
    }

    if (*validate) return malvol::cmd_validate(opts, std::cout, std::cerr);
    if (*density) return malvol::cmd_density(opts, std::cout, std::cerr);
    if (*price) return malvol::cmd_price(opts, std::cout, std::cerr);

    malvol::BatteryOptions battery;
    battery.threads = opts.threads;
    if (opts.seed) battery.seed = *opts.seed;
    return malvol::cmd_selfcheck(battery, std::cout, std::cerr);
}
