// kambeam <command> [--config file] [--set key=value]... [--out path] [--format json|csv]

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kambeam/cli.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string format = "json";
    std::vector<std::string> set;
    // Shorthands for common keys.
    std::string b, x1, sites, window, seed;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config,-c", f.config, "Configuration file ([<command>] section)");
    sub->add_option("--out,-o", f.out, "Report path (default: $KAMBEAM_OUT_DIR/<command>.<ext>, else stdout)");
    sub->add_option("--format,-f", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--set,-s", f.set, "Override a config key, key=value")->take_all();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kambeam: lattice resonances, normal forms, KAM steps and beam simulations"};
    app.require_subcommand(1);

    Flags f;
    const std::map<std::string, std::string> help = {
        {"sitegen", "Construct an admissible tangential set"},
        {"verify", "Check admissibility of a site set in a window"},
        {"classify", "List Type1/Type2 resonant pairs"},
        {"normalform", "Frequencies and couplings of the normal form"},
        {"melnikov", "Melnikov conditions at one parameter point"},
        {"measure", "Monte-Carlo excluded parameter measure"},
        {"schedule", "KAM iteration schedule"},
        {"kamstep", "One KAM step on a random truncated perturbation"},
        {"simulate", "Integrate the Galerkin truncated beam equation"},
        {"report", "Run every command section of a config into one report"},
    };
    for (const auto& name : kambeam::commands()) {
        auto* sub = app.add_subcommand(name, help.at(name));
        add_common(sub, f);
        if (name == "sitegen") {
            sub->add_option("--b", f.b, "Number of tangential sites");
            sub->add_option("--x1", f.x1, "Odd seed x1 > b^2");
        }
        if (name != "sitegen" && name != "schedule" && name != "report") {
            sub->add_option("--sites", f.sites, "Sites file (JSON or text pairs) or inline list");
        }
        if (name == "verify" || name == "classify" || name == "normalform" || name == "melnikov" || name == "measure" ||
            name == "kamstep") {
            sub->add_option("--window", f.window, "Scan radius");
        }
        if (name == "measure" || name == "kamstep") sub->add_option("--seed", f.seed, "Random seed");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    kambeam::RunOptions opts;
    opts.config_path = f.config;
    opts.out_path = f.out;
    opts.format = f.format;
    for (const auto& kv : f.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
            return 1;
        }
        opts.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!f.b.empty()) opts.overrides["b"] = f.b;
    if (!f.x1.empty()) opts.overrides["x1"] = f.x1;
    if (!f.window.empty()) opts.overrides["window"] = f.window;
    if (!f.seed.empty()) opts.overrides["seed"] = f.seed;
    if (!f.sites.empty()) {
        std::error_code ec;
        opts.overrides[std::filesystem::is_regular_file(f.sites, ec) ? "sites_file" : "sites"] = f.sites;
    }

    const auto result = kambeam::run(command, opts);
    if (result.exit_code == 1 || (result.report.empty() && result.exit_code != 0)) {
        std::cerr << "error: " << result.message << "\n";
    }
    if (result.files.empty()) {
        std::cout << result.report;
    } else {
        for (const auto& file : result.files) std::cerr << "wrote " << file << "\n";
    }
    if (result.exit_code == 2) std::cerr << result.message << "\n";
    return result.exit_code;
}
