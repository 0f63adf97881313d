// mvts: command-line driver for the mean-variance bandit simulator.
//
//   mvts run --config <path> --out <dir>
//   mvts plot --in <dir> --out <path>     (.svg renders a chart, anything else writes plot data)
//   mvts truths --print
//
// MVTS_THREADS overrides the number of replication worker threads.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mvts/config.hpp"
#include "mvts/environment.hpp"
#include "mvts/errors.hpp"
#include "mvts/harness.hpp"
#include "mvts/records.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const fs::path& config_path, const fs::path& out_dir, bool no_records) {
    const auto config = mvts::load_config(config_path);
    mvts::validate(config);

    const auto started = std::chrono::steady_clock::now();
    const auto result = mvts::run_experiment(config, mvts::RunOptions{.keep_records = !no_records});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    mvts::write_run_outputs(out_dir, result);

    std::size_t violations = 0;
    for (const auto& rep : result.replications) {
        for (const auto& trace : rep.traces) violations += trace.norm_violations;
    }
    if (violations > 0) {
        std::cerr << "warning: " << violations << " pulls used contexts with norm above 1\n";
    }

    std::cout << "replications=" << config.replications << " horizon=" << config.horizon << " rho=" << config.rho
              << " noise=" << mvts::to_string(config.noise.tag) << " (" << seconds << " s)\n";
    for (std::size_t p = 0; p < result.curves.policies.size(); ++p) {
        const auto kind = result.curves.policies[p];
        std::cout << "  " << mvts::to_string(kind) << ": mean total regret " << result.curves.final_mean(kind)
                  << " +- " << result.curves.stderr_cum_regret[p].back() << '\n';
    }
    std::cout << "outputs written to " << out_dir.string() << '\n';
    return 0;
}

int cmd_plot(const fs::path& in_dir, const fs::path& out_path) {
    const auto config = mvts::load_config(in_dir / "metadata.cfg");
    const auto records = mvts::read_csv(in_dir / "records.csv");
    const auto replications = mvts::replications_from_records(records, config.policies);
    const auto curves = mvts::aggregate(replications);

    if (out_path.extension() == ".svg") {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw mvts::IoError("cannot open " + out_path.string() + " for writing");
        char title[160];
        std::snprintf(title, sizeof title, "Mean total regret (K=%zu, d=%zu, rho=%g, %s noise, %zu replications)",
                      config.arms, config.dim, config.rho, std::string(mvts::to_string(config.noise.tag)).c_str(),
                      curves.replications);
        mvts::render_svg(out, curves, title);
        out.flush();
        if (!out) throw mvts::IoError("write failed for " + out_path.string());
    } else {
        mvts::emit_plot_data(out_path, curves);
    }
    return 0;
}

int cmd_truths() {
    mvts::write_truths(std::cout, mvts::builtin_portfolio_truths());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-averse contextual bandit simulator"};
    app.require_subcommand(1);

    fs::path config_path;
    fs::path run_out;
    bool no_records = false;
    auto* run = app.add_subcommand("run", "Run an experiment and write records, plot data and metadata");
    run->add_option("--config", config_path, "Experiment config (key = value)")->required();
    run->add_option("--out", run_out, "Output directory")->required();
    run->add_flag("--no-records", no_records, "Skip the per-round CSV (plot data and metadata only)");

    fs::path plot_in;
    fs::path plot_out;
    auto* plot = app.add_subcommand("plot", "Re-aggregate a stored run into plot data or an SVG chart");
    plot->add_option("--in", plot_in, "Directory written by 'run'")->required();
    plot->add_option("--out", plot_out, "Output file (.svg for a chart)")->required();

    bool print = false;
    auto* truths = app.add_subcommand("truths", "Show the built-in portfolio parameters");
    truths->add_flag("--print", print, "Print the table to stdout")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) return cmd_run(config_path, run_out, no_records);
        if (*plot) return cmd_plot(plot_in, plot_out);
        if (*truths) return cmd_truths();
    } catch (const std::exception& e) {
        std::cerr << "mvts: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
