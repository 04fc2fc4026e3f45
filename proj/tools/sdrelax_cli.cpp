#include "sdrelax/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char **argv) {
    using namespace sdrelax;
    CLI::App app{"Relaxation experiments for structured deformations"};
    std::string config_path;
    RunOptions options;
    std::string output;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "JSON experiment description")->required();
    app.add_option("--jobs", options.jobs, "worker threads")->check(CLI::PositiveNumber);
    auto *out_opt = app.add_option("--output", output, "CSV destination (default: stdout)");
    auto *seed_opt = app.add_option("--seed", seed, "overrides the config seed");
    std::string commands;
    for (const auto &c : command_names()) commands += (commands.empty() ? "" : ", ") + c;
    app.footer("Commands (config field \"command\"): " + commands);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (*out_opt) options.output = output;
    if (*seed_opt) options.seed = seed;

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << Json{{"error", "io"}, {"message", "cannot read config " + config_path}}.dump() << '\n';
        return kExitIo;
    }
    Json config;
    try {
        config = Json::parse(in);
    } catch (const Json::exception &e) {
        std::cerr << Json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
        return kExitConfig;
    }
    const RunResult r = run(config, options);
    if (r.exit_code != kExitOk) {
        std::cerr << r.error << '\n';
        return r.exit_code;
    }
    if (!r.written) std::cout << r.csv;
    return kExitOk;
}
