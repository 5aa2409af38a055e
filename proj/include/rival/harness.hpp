#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rival/allocation.hpp"
#include "rival/binning.hpp"
#include "rival/samplers.hpp"

namespace rival {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StrategyKind {
    Equal,
    Grassberger,
    Fox,
    Extent,
    Jsd,
    SissonIntensity,
    SissonNearest,
};

std::string strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

struct TargetSpec {
    enum class Type { Gaussian, PoissonProcess } type = Type::Gaussian;
    // Gaussian
    double mean = 0.0;
    double sd = 1.0;
    // Poisson process: either synthetic (breaks + levels) or an event file.
    std::vector<double> breaks;
    std::vector<double> levels;
    std::string events_file;
};

struct ExperimentConfig {
    std::vector<TargetSpec> targets;
    GridSpec grid;
    std::vector<StrategyKind> strategies;
    Loss loss = Loss::Max;
    std::int64_t budget = 0;
    std::vector<std::int64_t> minima;
    int replications = 1;
    std::uint64_t master_seed = 0;
    int thin = 50;
    ChangepointModel model;
    bool model_rate_given = false;  // otherwise the rate defaults per target data
    bool record_trace = false;

    void validate() const;
};

ExperimentConfig load_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config_file(const std::string& path);

struct StrategyTargetResult {
    std::vector<std::int64_t> sizes;     // one per replication
    std::vector<BinnedMeasure> measures; // one per replication
    double mean_size = 0.0;
    double ekl = 0.0;  // cross-replication JSD ground-truth estimate
};

struct StrategyResult {
    StrategyKind kind = StrategyKind::Equal;
    std::vector<StrategyTargetResult> targets;
    double loss = 0.0;
    std::string trace_csv;  // replication 0, when tracing is enabled
};

struct ExperimentResult {
    Loss loss = Loss::Max;
    std::vector<StrategyResult> strategies;
};

// Runs every strategy over `replications` independent replications with
// common random numbers: sampler j in replication r is seeded from
// (master_seed, r, j), so its draw sequence is identical across strategies.
// threads = 0 means available parallelism.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 0);

// Cross-run ground-truth divergence error of one target under one strategy.
double ground_truth_ekl(const std::vector<BinnedMeasure>& measures);

// Writes summary.csv and sizes.csv (plus trace_<strategy>.csv when traced).
void emit_results(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace rival
