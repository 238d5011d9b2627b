#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdim/errors.hpp"
#include "mdim/experiments.hpp"
#include "mdim/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitPrecision = 4;

constexpr double kNatsToBits = 1.4426950408889634; // 1 / ln 2

struct ParamFlag {
    const char* flag;
    const char* key;
    const char* help;
};

// Experiment-specific overrides; everything lands in config.params.
const std::vector<ParamFlag> kParamFlags = {
    {"--k", "k", "comma list of product-measure sizes k"},
    {"--delta", "delta", "mass defect delta"},
    {"--delta-list", "delta-list", "comma list of deltas"},
    {"--eps", "eps", "radius"},
    {"--eps-list", "eps-list", "comma list of radii"},
    {"--n-max", "n-max", "largest iterate depth"},
    {"--n-min", "n-min", "smallest iterate depth"},
    {"--n", "n", "block length"},
    {"--p", "p", "Bernoulli parameter"},
    {"--L", "L", "sandwich scale L"},
    {"--l", "l", "shift window radius"},
    {"--k-max", "k-max", "block tower truncation"},
    {"--k-cap", "k-cap", "largest product-measure size searched"},
    {"--restarts", "restarts", "codebook restarts"},
    {"--budget", "budget", "window enumeration budget"},
    {"--growth-k", "growth-k", "block index for the growth measurement"},
    {"--growth-m", "growth-m", "iterate depth for the growth measurement"},
};

void print_bits_note(const mdim::RunManifest& man, const std::filesystem::path& dir) {
    // Rates in emitted files are nats; echo headline rates in bits.
    for (const auto& f : man.files) {
        if (f != "summary.json") continue;
        try {
            std::string text = mdim::io::read_file(dir / f);
            std::printf("summary (rates shown in bits where applicable):\n");
            for (const char* key : {"codebook_rate_final", "blahut_rate_final",
                                    "entropy_nats", "slope", "shannon_nats"}) {
                auto pos = text.find(std::string("\"") + key + "\"");
                if (pos == std::string::npos) continue;
                auto colon = text.find(':', pos);
                double v = std::stod(text.substr(colon + 1));
                std::printf("  %s = %s nats = %s bits\n", key, mdim::io::fmt(v).c_str(),
                            mdim::io::fmt(v * kNatsToBits).c_str());
            }
        } catch (const std::exception&) {
            // summary display is best effort
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamical metrics, counting estimators and rate-distortion experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a registered experiment");
    std::string experiment;
    run->add_option("experiment", experiment, "registry name, see `list`")->required();
    std::string config_file;
    run->add_option("--config", config_file, "key = value config file");
    std::string out_dir;
    run->add_option("--out", out_dir, "output directory");
    std::string seed_str;
    run->add_option("--seed", seed_str, "RNG seed");
    int threads = 0;
    run->add_option("--threads", threads, "cap worker threads");
    bool bits = false;
    run->add_flag("--bits", bits, "display rates in bits as well as nats");
    std::vector<std::pair<const ParamFlag*, std::string>> given;
    std::vector<std::string> storage(kParamFlags.size());
    for (std::size_t i = 0; i < kParamFlags.size(); ++i)
        run->add_option(kParamFlags[i].flag, storage[i], kParamFlags[i].help);

    auto* list = app.add_subcommand("list", "list registered experiments");
    bool as_json = false;
    list->add_flag("--json", as_json, "machine readable registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitConfig;
    }

    if (list->parsed()) {
        if (as_json) {
            std::fputs(mdim::registry_json().c_str(), stdout);
        } else {
            for (const auto& e : mdim::list_registry())
                std::printf("%-20s %-5s %s\n", e.name.c_str(), e.anchor.c_str(),
                            e.summary.c_str());
        }
        return 0;
    }

    try {
        mdim::ExperimentConfig cfg;
        if (!config_file.empty()) cfg = mdim::parse_config_file(config_file);
        cfg.experiment = experiment;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!seed_str.empty()) mdim::apply_param(cfg, "seed", seed_str);
        if (threads > 0) cfg.threads = threads;
        if (bits) cfg.bits = true;
        for (std::size_t i = 0; i < kParamFlags.size(); ++i)
            if (run->count(kParamFlags[i].flag) > 0)
                mdim::apply_param(cfg, kParamFlags[i].key, storage[i]);

        mdim::RunManifest man = mdim::run_experiment(cfg);
        std::printf("%s: wrote %zu files to %s in %.1f ms\n", man.experiment.c_str(),
                    man.files.size(), cfg.out_dir.string().c_str(), man.wall_ms);
        for (const auto& f : man.files) std::printf("  %s\n", f.c_str());
        if (cfg.bits) print_bits_note(man, cfg.out_dir);
        return 0;
    } catch (const mdim::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const mdim::budget_error& e) {
        std::fprintf(stderr, "budget exceeded: %s\n", e.what());
        return kExitBudget;
    } catch (const mdim::precision_error& e) {
        std::fprintf(stderr, "precision refusal: %s\n", e.what());
        return kExitPrecision;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
