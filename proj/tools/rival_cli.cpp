#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rival/binning.hpp"
#include "rival/estimators.hpp"
#include "rival/harness.hpp"
#include "rival/special_functions.hpp"

namespace {

unsigned threads_from_env() {
    const char* value = std::getenv("RIVAL_THREADS");
    if (!value)
        return 0;  // available parallelism
    const long parsed = std::strtol(value, nullptr, 10);
    return parsed > 0 ? static_cast<unsigned>(parsed) : 0;
}

int cmd_run_experiment(const std::string& config_path, const std::string& out_dir) {
    const rival::ExperimentConfig config = rival::load_experiment_config_file(config_path);
    const rival::ExperimentResult result = rival::run_experiment(config, threads_from_env());
    rival::emit_results(result, out_dir);
    return 0;
}

int cmd_bin_width(const std::string& data_path, double min, double max, int k_min, int k_max) {
    std::ifstream in(data_path);
    if (!in)
        throw rival::ConfigError("cannot open data file: " + data_path);
    std::vector<double> data;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            data.push_back(std::stod(line));
    const rival::BinOptimum best = rival::optimize_bins(data, min, max, k_min, k_max);
    std::cout.precision(17);
    std::cout << best.bins << ' ' << best.alpha << ' ' << best.log_marginal << '\n';
    return 0;
}

int cmd_estimate(const std::string& dump_path, const std::string& criterion, double delta) {
    std::ifstream in(dump_path);
    if (!in)
        throw rival::ConfigError("cannot open measure dump: " + dump_path);
    const rival::BinnedMeasure measure = rival::read_measure(in);
    std::cout.precision(17);
    if (criterion == "grassberger") {
        std::cout << rival::grassberger_error_batch(measure) << '\n';
    } else if (criterion == "miller-madow") {
        std::cout << rival::miller_madow(measure) << '\n';
    } else if (criterion == "fox") {
        const auto bins = measure.nonempty_bins();
        const double error =
            bins <= 1 ? 0.0
                      : rival::chi_square_quantile_cached(static_cast<int>(bins - 1),
                                                          1.0 - delta) /
                            (2.0 * static_cast<double>(measure.total()));
        std::cout << error << '\n';
    } else if (criterion == "extent") {
        std::cout << rival::extent_squared(measure) << '\n';
    } else {
        throw rival::ConfigError("unknown criterion: " + criterion);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive sample-budget allocation across rival samplers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "results";
    CLI::App* run = app.add_subcommand("run-experiment", "Run a replicated experiment");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory");

    std::string data_path;
    double min = 0.0, max = 1.0;
    int k_min = 1, k_max = 100;
    CLI::App* bin_width =
        app.add_subcommand("bin-width", "Maximum-likelihood histogram bin-count selection");
    bin_width->add_option("data", data_path, "Newline-separated reals")->required();
    bin_width->add_option("--min", min, "Lower edge")->required();
    bin_width->add_option("--max", max, "Upper edge")->required();
    bin_width->add_option("--k-min", k_min, "Smallest bin count");
    bin_width->add_option("--k-max", k_max, "Largest bin count");

    std::string dump_path;
    std::string criterion = "grassberger";
    double delta = 0.05;
    CLI::App* estimate = app.add_subcommand("estimate", "Error estimate for a measure dump");
    estimate->add_option("dump", dump_path, "Measure dump (key<TAB>count lines)")->required();
    estimate->add_option("--criterion", criterion, "grassberger|miller-madow|fox|extent");
    estimate->add_option("--delta", delta, "Fox significance level");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run_experiment(config_path, out_dir);
        if (bin_width->parsed())
            return cmd_bin_width(data_path, min, max, k_min, k_max);
        if (estimate->parsed())
            return cmd_estimate(dump_path, criterion, delta);
    } catch (const rival::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
