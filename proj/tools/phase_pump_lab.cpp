// phase-pump-lab <mode|figure> --config <path> [--workers N] [--out DIR]
// exit 0 on success, 1 on any sweep-point failure, 2 on config errors

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "phasepump/figures.hpp"
#include "phasepump/sweep.hpp"

int main(int argc, char** argv) {
    CLI::App app{"two-tone phase pump laboratory"};
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    app.add_option("command", command,
                   "run mode (classical|adiabatic|floquet|propagate|duffing) "
                   "or figure name (fig2|fig3a|fig3b|fig3c|fig3d|fig4|fig5|"
                   "figS1)")
        ->required();
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--workers", workers, "concurrent sweep evaluations");
    app.add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    using namespace phasepump;
    if (is_figure_name(command)) {
        try {
            return reproduce_figure(command, out_dir, workers);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 1;
        }
    }

    if (command.rfind("fig", 0) == 0) {
        std::fprintf(stderr, "error: unknown figure name '%s'\n",
                     command.c_str());
        return 2;
    }
    if (config_path.empty()) {
        std::fprintf(stderr, "error: --config is required for mode runs\n");
        return 2;
    }
    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "error: cannot read %s\n", config_path.c_str());
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    RunConfig cfg;
    try {
        cfg = parse_config(buf.str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (command != mode_name(cfg.mode)) {
        std::fprintf(stderr,
                     "config error: command '%s' does not match the config's "
                     "[%s] section\n",
                     command.c_str(), mode_name(cfg.mode));
        return 2;
    }

    try {
        auto out = run_sweep(cfg, workers, out_dir);
        std::printf("%s: %d rows, %d failures -> %s\n", mode_name(cfg.mode),
                    out.rows, out.failures, out.csv_path.c_str());
        return out.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
