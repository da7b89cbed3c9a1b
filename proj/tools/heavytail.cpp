// Experiment runner CLI. Usage:
//   heavytail <experiment> --config <file> [--out <dir>] [--format csv|json] [--seed N]
// Exit codes: 0 = all verdicts pass, 2 = inconclusive present, 1 = failure/error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "heavytail/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"heavy-tail asymptotics experiment runner"};
    std::string experiment, config_path, out_dir = ".", format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("experiment", experiment, "experiment name")->required();
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    auto* seed_opt = app.add_option("--seed", seed, "override config seed");
    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open config: " + config_path);
        std::string raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
        auto cfg = heavytail::ordered_json::parse(raw);
        if (seed_set) cfg["seed"] = seed;

        heavytail::RunContext ctx;
        ctx.out_dir = out_dir;
        const auto t0 = std::chrono::steady_clock::now();
        heavytail::ResultTable table = heavytail::run_experiment(experiment, cfg, ctx);
        const auto t1 = std::chrono::steady_clock::now();
        table.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
        // the hash covers the effective config (including any seed override)
        table.config_hash = heavytail::fnv1a_hex(cfg.dump());

        const std::string path = out_dir + "/" + experiment + "." + format;
        if (format == "csv")
            heavytail::write_file(path, heavytail::to_csv(table));
        else
            heavytail::write_file(path, heavytail::to_json(table).dump(2) + "\n");
        std::cout << experiment << ": " << heavytail::to_string(table.verdict) << " ("
                  << table.rows.size() << " rows -> " << path << ")\n";
        switch (table.verdict) {
            case heavytail::Verdict::pass: return 0;
            case heavytail::Verdict::inconclusive: return 2;
            default: return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
