#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cospricer/bench.hpp"
#include "cospricer/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"COS option pricer: truncation-range experiments"};
    std::string experiment;
    std::string config_path;
    std::string out_path;
    bool no_timing = false;
    app.add_option("experiment", experiment,
                   "price | range | density | figure1 | figure2 | table1 | table2 | counterexamples")
        ->required();
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out", out_path, "CSV output path ('-' for stdout)")->required();
    app.add_flag("--no-timing", no_timing, "skip timing columns (byte-stable output)");
    CLI11_PARSE(app, argc, argv);

    using namespace cospricer;
    try {
        auto cfg = bench::load_config(config_path, bench::experiment_from_string(experiment));
        if (no_timing) cfg.timing = false;
        if (out_path == "-") return bench::run_experiment(cfg, std::cout, std::cerr);
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot open output '" + out_path + "'");
        const int code = bench::run_experiment(cfg, out, std::cerr);
        if (code == 0) std::cerr << "wrote " << out_path << '\n';
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const NoConvergence& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
