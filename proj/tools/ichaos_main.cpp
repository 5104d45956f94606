// Campaign driver: ichaos <campaign> --config <file> [--seed N] [--threads N]
//                          [--resume] [--out DIR]
//
// Exit codes: 0 run complete and all in-run checks passed; 2 run complete but
// a check failed; 1 configuration or runtime error.
#include <cstdint>
#include <cstdio>
#include <string>

#include "ichaos/campaigns.hpp"
#include "ichaos/config.hpp"
#include "ichaos/errors.hpp"

#include "CLI11.hpp"

using namespace ichaos;

int main(int argc, char** argv) {
    CLI::App app{"imaginary multiplicative chaos campaign driver"};
    app.name("ichaos");

    std::string campaign;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = -1;
    bool resume = false;

    app.add_option("campaign", campaign,
                   "moments | scaling | lil | fastpoints | tail | besov | whitenoise | "
                   "constant-a | sample-field")
        ->required();
    app.add_option("--config", config_path, "campaign configuration file")->required();
    CLI::Option* seed_opt = app.add_option("--seed", seed, "override master_seed");
    CLI::Option* threads_opt =
        app.add_option("--threads", threads, "override worker count (0 = auto)");
    app.add_flag("--resume", resume, "reuse completed shards from the output manifest");
    CLI::Option* out_opt = app.add_option("--out", out_dir, "override output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitRuntimeError;
    }

    // ---- Configuration ----
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
        cfg.experiment = campaign_from_name(campaign);
        if (seed_opt->count() > 0) cfg.master_seed = seed;
        if (threads_opt->count() > 0) cfg.threads = threads;
        if (out_opt->count() > 0) cfg.output_dir = out_dir;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "ichaos: %s\n", e.what());
        return kExitRuntimeError;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "ichaos: %s\n", e.what());
        for (const std::string& f : e.fields)
            std::fprintf(stderr, "ichaos:   invalid field: %s\n", f.c_str());
        return kExitRuntimeError;
    } catch (const Error& e) {
        std::fprintf(stderr, "ichaos: %s\n", e.what());
        return kExitRuntimeError;
    }

    // ---- Run ----
    const RunReport report = run_campaign(cfg, resume);
    const Json& doc = report.document;

    std::printf("campaign  %s\n", doc["campaign"].get<std::string>().c_str());
    std::printf("output    %s\n", cfg.output_dir.c_str());
    for (const Json& m : doc["metrics"]) {
        std::string line = m["name"].get<std::string>();
        if (m.contains("value") && m["value"].is_number())
            line += " = " + format_double(m["value"].get<double>());
        if (m.contains("stderr")) line += " (se " + format_double(m["stderr"].get<double>()) + ")";
        if (m.contains("pass")) line += m["pass"].get<bool>() ? "  [pass]" : "  [FAIL]";
        std::printf("  %s\n", line.c_str());
    }
    std::printf("wall      %.2f s\n", doc["wall_seconds"].get<double>());
    std::printf("status    %s\n", doc["status"].get<std::string>().c_str());
    if (doc.contains("error"))
        std::fprintf(stderr, "ichaos: %s\n", doc["error"].get<std::string>().c_str());
    return report.exit_code;
}
