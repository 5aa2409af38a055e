#include "rival/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "rival/rng.hpp"

namespace rival {

namespace {

// Stream purposes, kept distinct so adding one never reshuffles another.
constexpr std::uint64_t kPurposeChain = 0;
constexpr std::uint64_t kPurposeFoi = 1;
constexpr std::uint64_t kPurposeData = 0xDA7A;

std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

}  // namespace

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Equal: return "equal";
        case StrategyKind::Grassberger: return "grassberger";
        case StrategyKind::Fox: return "fox";
        case StrategyKind::Extent: return "extent";
        case StrategyKind::Jsd: return "jsd";
        case StrategyKind::SissonIntensity: return "sisson-i";
        case StrategyKind::SissonNearest: return "sisson-n";
    }
    throw std::logic_error("strategy_name: unknown strategy");
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "equal") return StrategyKind::Equal;
    if (name == "grassberger") return StrategyKind::Grassberger;
    if (name == "fox") return StrategyKind::Fox;
    if (name == "extent") return StrategyKind::Extent;
    if (name == "jsd") return StrategyKind::Jsd;
    if (name == "sisson-i") return StrategyKind::SissonIntensity;
    if (name == "sisson-n") return StrategyKind::SissonNearest;
    throw ConfigError("unknown strategy: " + name);
}

void ExperimentConfig::validate() const {
    if (targets.empty())
        throw ConfigError("no targets");
    if (strategies.empty())
        throw ConfigError("no strategies");
    if (replications < 1)
        throw ConfigError("replications must be >= 1");
    if (thin < 1)
        throw ConfigError("thin factor must be >= 1");
    if (minima.size() != targets.size())
        throw ConfigError("need one minimum per target");
    std::int64_t minimum_total = 0;
    for (std::int64_t minimum : minima) {
        if (minimum < 1)
            throw ConfigError("minima must be >= 1");
        minimum_total += minimum;
    }
    if (budget < minimum_total)
        throw ConfigError("budget below the sum of minima");
    try {
        grid.validate();
        model.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const bool has_sisson =
        std::any_of(strategies.begin(), strategies.end(), [](StrategyKind s) {
            return s == StrategyKind::SissonIntensity || s == StrategyKind::SissonNearest;
        });
    if (has_sisson) {
        for (const TargetSpec& target : targets)
            if (target.type != TargetSpec::Type::PoissonProcess)
                throw ConfigError("Sisson strategies require Poisson-process targets");
    }
    for (const TargetSpec& target : targets) {
        if (target.type == TargetSpec::Type::Gaussian) {
            if (!(target.sd > 0.0))
                throw ConfigError("Gaussian target needs sd > 0");
        } else if (target.events_file.empty()) {
            if (target.levels.size() != target.breaks.size() + 1)
                throw ConfigError("Poisson target needs one level per segment");
        }
    }
}

ExperimentConfig load_experiment_config(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig config;
        for (const auto& t : j.at("targets")) {
            TargetSpec target;
            const std::string type = t.at("type").get<std::string>();
            if (type == "gaussian") {
                target.type = TargetSpec::Type::Gaussian;
                target.mean = t.value("mean", 0.0);
                target.sd = t.at("sd").get<double>();
            } else if (type == "poisson-process") {
                target.type = TargetSpec::Type::PoissonProcess;
                if (t.contains("events_file")) {
                    target.events_file = t.at("events_file").get<std::string>();
                } else {
                    target.breaks = t.at("breaks").get<std::vector<double>>();
                    target.levels = t.at("levels").get<std::vector<double>>();
                }
            } else {
                throw ConfigError("unknown target type: " + type);
            }
            config.targets.push_back(std::move(target));
        }
        const auto& g = j.at("grid");
        config.grid.lower = g.at("min").get<double>();
        config.grid.upper = g.at("max").get<double>();
        config.grid.bins = g.at("bins").get<int>();
        config.grid.tails = g.value("tails", false);
        for (const auto& s : j.at("strategies"))
            config.strategies.push_back(strategy_from_name(s.get<std::string>()));
        const std::string loss = j.at("loss").get<std::string>();
        if (loss == "max")
            config.loss = Loss::Max;
        else if (loss == "ave")
            config.loss = Loss::Ave;
        else
            throw ConfigError("loss must be \"max\" or \"ave\"");
        config.budget = j.at("budget").get<std::int64_t>();
        const auto& minima = j.at("minimum_samples");
        if (minima.is_array())
            config.minima = minima.get<std::vector<std::int64_t>>();
        else
            config.minima.assign(config.targets.size(), minima.get<std::int64_t>());
        config.replications = j.at("replications").get<int>();
        config.master_seed = j.at("master_seed").get<std::uint64_t>();
        config.thin = j.value("thin", 50);
        config.record_trace = j.value("record_trace", false);
        if (j.contains("model")) {
            const auto& m = j.at("model");
            config.model.prior_mean_changepoints = m.value("nu", 1.0);
            config.model.gamma_shape = m.value("gamma_shape", 1.0);
            if (m.contains("gamma_rate")) {
                config.model.gamma_rate = m.at("gamma_rate").get<double>();
                config.model_rate_given = true;
            }
        }
        config.validate();
        return config;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return load_experiment_config(in);
}

double ground_truth_ekl(const std::vector<BinnedMeasure>& measures) {
    if (measures.size() < 2)
        throw std::domain_error("ground_truth_ekl: need at least two runs");
    return jsd_across(measures);
}

namespace {

std::unique_ptr<ErrorCriterion> make_criterion(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Grassberger: return std::make_unique<GrassbergerCriterion>();
        case StrategyKind::Fox: return std::make_unique<FoxCriterion>();
        case StrategyKind::Extent: return std::make_unique<ExtentCriterion>();
        case StrategyKind::Jsd: return std::make_unique<SplitJsdCriterion>();
        case StrategyKind::SissonIntensity:
            return std::make_unique<SissonCriterion>(FunctionOfInterest::IntensityLevel);
        case StrategyKind::SissonNearest:
            return std::make_unique<SissonCriterion>(
                FunctionOfInterest::NearestChangepointDistance);
        case StrategyKind::Equal: break;
    }
    throw std::logic_error("make_criterion: strategy has no criterion");
}

struct TargetContext {
    PoissonProcessData data;     // Poisson targets only
    ChangepointModel model;
};

std::unique_ptr<SampleSource> make_sampler(const ExperimentConfig& config,
                                           const TargetContext& context,
                                           std::size_t target_index, int replication) {
    const TargetSpec& target = config.targets[target_index];
    const std::uint64_t r = static_cast<std::uint64_t>(replication) + 1;
    if (target.type == TargetSpec::Type::Gaussian) {
        return std::make_unique<GaussianSampler>(
            target.mean, target.sd, config.grid,
            make_stream(config.master_seed, r, target_index, kPurposeChain));
    }
    return std::make_unique<ChangepointSampler>(
        context.model, context.data, config.grid, config.thin,
        make_stream(config.master_seed, r, target_index, kPurposeChain),
        make_stream(config.master_seed, r, target_index, kPurposeFoi));
}

struct ReplicationOutput {
    // [strategy][target]
    std::vector<std::vector<std::int64_t>> sizes;
    std::vector<std::vector<BinnedMeasure>> measures;
    std::vector<std::string> traces;
};

ReplicationOutput run_replication(const ExperimentConfig& config,
                                  const std::vector<TargetContext>& contexts,
                                  int replication) {
    const std::size_t m = config.targets.size();
    ReplicationOutput output;
    output.sizes.resize(config.strategies.size());
    output.measures.resize(config.strategies.size());
    output.traces.resize(config.strategies.size());

    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
        const StrategyKind kind = config.strategies[s];
        std::vector<std::unique_ptr<SampleSource>> samplers;
        samplers.reserve(m);
        for (std::size_t j = 0; j < m; ++j)
            samplers.push_back(make_sampler(config, contexts[j], j, replication));

        if (kind == StrategyKind::Equal) {
            output.sizes[s].assign(m, config.budget / static_cast<std::int64_t>(m));
            for (std::size_t j = 0; j < config.budget % m; ++j)
                ++output.sizes[s][j];
            output.measures[s].resize(m);
            for (std::size_t j = 0; j < m; ++j)
                for (std::int64_t i = 0; i < output.sizes[s][j]; ++i)
                    output.measures[s][j].insert(samplers[j]->draw());
            continue;
        }

        std::vector<std::unique_ptr<ErrorCriterion>> criteria;
        std::vector<SampleSource*> sampler_ptrs;
        std::vector<ErrorCriterion*> criterion_ptrs;
        for (std::size_t j = 0; j < m; ++j) {
            criteria.push_back(make_criterion(kind));
            sampler_ptrs.push_back(samplers[j].get());
            criterion_ptrs.push_back(criteria.back().get());
        }
        AllocationPlan plan;
        plan.budget = config.budget;
        plan.minima = config.minima;
        plan.loss = config.loss;
        plan.record_trace = config.record_trace && replication == 0;
        AllocationResult allocation = run_allocation(sampler_ptrs, criterion_ptrs, plan);
        if (plan.record_trace) {
            std::ostringstream trace;
            write_trace_csv(trace, allocation);
            output.traces[s] = trace.str();
        }
        output.sizes[s] = std::move(allocation.sizes);
        output.measures[s] = std::move(allocation.measures);
    }
    return output;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    const std::size_t m = config.targets.size();
    const std::size_t num_strategies = config.strategies.size();
    const int reps = config.replications;

    // Poisson-process data are fixed per target: one dataset defines each
    // posterior, shared by every replication and strategy.
    std::vector<TargetContext> contexts(m);
    for (std::size_t j = 0; j < m; ++j) {
        const TargetSpec& target = config.targets[j];
        if (target.type != TargetSpec::Type::PoissonProcess)
            continue;
        if (!target.events_file.empty()) {
            std::ifstream in(target.events_file);
            if (!in)
                throw ConfigError("cannot open events file: " + target.events_file);
            contexts[j].data = read_event_data(in);
        } else {
            // The realized dataset defines the target posterior, so synthetic
            // targets use a fixed canonical realization per target index:
            // changing the master seed varies the sampling randomness, not
            // the targets under study.
            auto rng = make_stream(kPurposeData, kPurposeData, j);
            contexts[j].data = simulate_poisson_process(target.breaks, target.levels, rng);
        }
        contexts[j].model = config.model;
        if (!config.model_rate_given) {
            // Prior intensity mean matches the observed average rate.
            const auto total = static_cast<double>(contexts[j].data.events.size());
            contexts[j].model.gamma_rate =
                total > 0.0 ? config.model.gamma_shape / total : 1.0;
        }
    }

    std::vector<ReplicationOutput> outputs(static_cast<std::size_t>(reps));
    unsigned worker_count = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (worker_count == 0)
        worker_count = 1;
    worker_count = std::min<unsigned>(worker_count, static_cast<unsigned>(reps));

    std::atomic<int> next_replication{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            const int r = next_replication.fetch_add(1);
            if (r >= reps || failed.load())
                return;
            try {
                outputs[static_cast<std::size_t>(r)] = run_replication(config, contexts, r);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty())
                    failure = e.what();
            }
        }
    };
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < worker_count; ++w)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }
    if (failed.load())
        throw std::runtime_error("run_experiment: " + failure);

    ExperimentResult result;
    result.loss = config.loss;
    result.strategies.resize(num_strategies);
    for (std::size_t s = 0; s < num_strategies; ++s) {
        StrategyResult& strategy = result.strategies[s];
        strategy.kind = config.strategies[s];
        strategy.targets.resize(m);
        strategy.trace_csv = outputs.empty() ? std::string() : outputs[0].traces[s];
        for (std::size_t j = 0; j < m; ++j) {
            StrategyTargetResult& target = strategy.targets[j];
            target.sizes.reserve(static_cast<std::size_t>(reps));
            target.measures.reserve(static_cast<std::size_t>(reps));
            for (int r = 0; r < reps; ++r) {
                target.sizes.push_back(outputs[static_cast<std::size_t>(r)].sizes[s][j]);
                target.measures.push_back(
                    std::move(outputs[static_cast<std::size_t>(r)].measures[s][j]));
            }
            double mean = 0.0;
            for (std::int64_t size : target.sizes)
                mean += static_cast<double>(size);
            target.mean_size = mean / static_cast<double>(reps);
            target.ekl = reps >= 2 ? ground_truth_ekl(target.measures)
                                   : std::numeric_limits<double>::quiet_NaN();
        }
        if (config.loss == Loss::Max) {
            double worst = -std::numeric_limits<double>::infinity();
            for (const StrategyTargetResult& target : strategy.targets)
                worst = std::max(worst, target.ekl);
            strategy.loss = worst;
        } else {
            double sum = 0.0;
            for (const StrategyTargetResult& target : strategy.targets)
                sum += target.ekl;
            strategy.loss = sum / static_cast<double>(m);
        }
    }
    return result;
}

void emit_results(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream summary(dir / "summary.csv");
    std::ofstream sizes(dir / "sizes.csv");
    if (!summary || !sizes)
        throw std::runtime_error("emit_results: cannot write to " + dir.string());
    summary << "strategy,target,mean_n,ekl,loss\n";
    sizes << "strategy,target,replication,n\n";
    for (const StrategyResult& strategy : result.strategies) {
        const std::string name = strategy_name(strategy.kind);
        for (std::size_t j = 0; j < strategy.targets.size(); ++j) {
            const StrategyTargetResult& target = strategy.targets[j];
            summary << name << ',' << j << ',' << fmt(target.mean_size) << ','
                    << fmt(target.ekl) << ',' << fmt(strategy.loss) << '\n';
            for (std::size_t r = 0; r < target.sizes.size(); ++r)
                sizes << name << ',' << j << ',' << r << ',' << target.sizes[r] << '\n';
        }
        if (!strategy.trace_csv.empty()) {
            std::ofstream trace(dir / ("trace_" + name + ".csv"));
            trace << strategy.trace_csv;
        }
    }
}

}  // namespace rival
