// End-to-end acceptance checks. Each check prints a single pass/fail line;
// the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rival/binning.hpp"
#include "rival/estimators.hpp"
#include "rival/harness.hpp"
#include "rival/rng.hpp"
#include "rival/samplers.hpp"
#include "rival/special_functions.hpp"

using namespace rival;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

void run(int index, const std::string& name,
         const std::function<bool(std::string&)>& check) {
    std::string detail;
    bool ok = false;
    try {
        ok = check(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    report(index, name, ok, detail);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- criterion 1 -----------------------------------------------------------

bool incremental_matches_batch(std::string& detail) {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<int> bin(0, 99);
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    std::vector<GrassbergerState> states(10);
    for (GrassbergerState& state : states)
        for (int i = 0; i < 10000; ++i)
            state.observe(BinKey{bin(rng)});
    const double elapsed = seconds_since(start);
    for (const GrassbergerState& state : states) {
        worst = std::max(worst,
                         std::fabs(state.error - grassberger_error_batch(state.measure)));
        worst = std::max(
            worst, std::fabs(state.decrease - grassberger_decrease_batch(state.measure)));
    }
    std::ostringstream out;
    out << "max drift " << worst << ", " << elapsed << " s";
    detail = out.str();
    return worst < 1e-10 && elapsed < 1.0;
}

// ---- criterion 2 -----------------------------------------------------------

// Independent evaluation of the expected one-step error change by full
// outcome enumeration, using digamma directly.
double phi_direct(std::int64_t c) {
    if (c == 0)
        return 0.0;
    const double n = static_cast<double>(c);
    return n * (std::log(n) - digamma(n));
}

double error_direct(const std::vector<std::int64_t>& counts, std::int64_t n) {
    double sum = 0.0;
    for (std::int64_t c : counts)
        sum += phi_direct(c);
    return sum / static_cast<double>(n);
}

double decrease_enumerated(const std::vector<std::int64_t>& counts, std::int64_t n) {
    const double now = error_direct(counts, n);
    double expected = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::vector<std::int64_t> next = counts;
        ++next[i];
        expected += (static_cast<double>(counts[i]) / static_cast<double>(n)) *
                    error_direct(next, n + 1);
    }
    return now - expected;
}

bool one_step_enumeration(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    long checked = 0;
    // Every partition of n <= 30 into at most 6 positive parts; values only
    // depend on the count multiset.
    std::vector<std::int64_t> parts;
    std::function<void(std::int64_t, std::int64_t)> recurse =
        [&](std::int64_t remaining_cap, std::int64_t min_part) {
            if (!parts.empty()) {
                std::map<BinKey, std::int64_t> table;
                std::int64_t n = 0;
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    table[BinKey{static_cast<std::int32_t>(i)}] = parts[i];
                    n += parts[i];
                }
                const BinnedMeasure measure = BinnedMeasure::from_counts(table);
                const double implementation = grassberger_decrease_batch(measure);
                const double oracle = decrease_enumerated(parts, n);
                worst = std::max(worst, std::fabs(implementation - oracle));
                worst = std::max(
                    worst, std::fabs(grassberger_error_batch(measure) - error_direct(parts, n)));
                ++checked;
            }
            if (parts.size() == 6)
                return;
            for (std::int64_t next = min_part; next <= remaining_cap; ++next) {
                parts.push_back(next);
                recurse(remaining_cap - next, next);
                parts.pop_back();
            }
        };
    recurse(30, 1);
    const double elapsed = seconds_since(start);
    std::ostringstream out;
    out << checked << " measures, max deviation " << worst << ", " << elapsed << " s";
    detail = out.str();
    return worst < 1e-12 && elapsed < 10.0;
}

// ---- criteria 3 and 4 ------------------------------------------------------

ExperimentConfig two_gaussian_config(Loss loss) {
    ExperimentConfig config;
    TargetSpec narrow;
    narrow.sd = 1.0;
    TargetSpec wide;
    wide.sd = 2.0;
    config.targets = {narrow, wide};
    config.grid = GridSpec{-10.0, 10.0, 100, true};
    config.strategies = {StrategyKind::Equal, StrategyKind::Grassberger};
    config.loss = loss;
    config.budget = 100000;
    config.minima = {500, 500};
    config.replications = 200;
    config.master_seed = 20240817;
    return config;
}

bool two_gaussians_max_loss(std::string& detail) {
    const ExperimentResult result = run_experiment(two_gaussian_config(Loss::Max));
    const StrategyResult& equal = result.strategies[0];
    const StrategyResult& grassberger = result.strategies[1];
    const double size_ratio =
        grassberger.targets[1].mean_size / grassberger.targets[0].mean_size;
    const double adaptive_ekl_ratio =
        grassberger.targets[1].ekl / grassberger.targets[0].ekl;
    const double equal_ekl_ratio = equal.targets[1].ekl / equal.targets[0].ekl;
    std::ostringstream out;
    out << "size ratio " << size_ratio << ", adaptive error ratio " << adaptive_ekl_ratio
        << ", equal-split error ratio " << equal_ekl_ratio;
    detail = out.str();
    return size_ratio > 1.8 && size_ratio < 2.2 && adaptive_ekl_ratio > 0.85 &&
           adaptive_ekl_ratio < 1.2 && equal_ekl_ratio > 1.6;
}

bool two_gaussians_ave_loss(std::string& detail) {
    const ExperimentResult result = run_experiment(two_gaussian_config(Loss::Ave));
    const StrategyResult& equal = result.strategies[0];
    const StrategyResult& grassberger = result.strategies[1];
    const double size_ratio =
        grassberger.targets[1].mean_size / grassberger.targets[0].mean_size;
    std::ostringstream out;
    out << "size ratio " << size_ratio << ", average loss " << grassberger.loss
        << " vs equal-split " << equal.loss;
    detail = out.str();
    return size_ratio > 1.25 && size_ratio < 1.55 && grassberger.loss <= equal.loss;
}

// ---- criterion 5 -----------------------------------------------------------

bool changepoint_ordering(std::string& detail) {
    ExperimentConfig config;
    const std::vector<std::vector<double>> level_sets{
        {200.0, 300.0, 400.0}, {200.0, 350.0, 500.0}, {200.0, 400.0, 600.0}};
    for (const std::vector<double>& levels : level_sets) {
        TargetSpec target;
        target.type = TargetSpec::Type::PoissonProcess;
        target.breaks = {1.0 / 3.0, 2.0 / 3.0};
        target.levels = levels;
        config.targets.push_back(std::move(target));
    }
    config.grid = GridSpec{0.0, 1.0, 50, false};
    config.strategies = {StrategyKind::Grassberger};
    config.loss = Loss::Max;
    config.budget = 150000;
    config.minima = {500, 500, 500};
    config.replications = 50;
    config.master_seed = 424242;
    config.thin = 50;

    const auto start = std::chrono::steady_clock::now();
    const ExperimentResult result = run_experiment(config);
    const double elapsed = seconds_since(start);
    const auto& targets = result.strategies[0].targets;
    std::ostringstream out;
    out << "mean sizes " << targets[0].mean_size << " / " << targets[1].mean_size << " / "
        << targets[2].mean_size << ", " << elapsed << " s";
    detail = out.str();
    return targets[2].mean_size > targets[1].mean_size &&
           targets[1].mean_size > targets[0].mean_size;
}

// ---- criterion 6 -----------------------------------------------------------

bool bin_width_selection(std::string& detail) {
    std::mt19937_64 rng(606);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> data(100000);
    for (double& x : data)
        x = normal(rng);
    const BinOptimum best = optimize_bins(data, -10.0, 10.0, 2, 150);

    const BinOptimum single = optimize_bins(std::vector<double>{0.3}, 0.0, 2.0, 1, 8);
    const double identity_gap = std::fabs(single.log_marginal + std::log(2.0));

    std::ostringstream out;
    out << "selected " << best.bins << " bins (alpha " << best.alpha
        << "), single-point gap " << identity_gap;
    detail = out.str();
    return best.bins >= 60 && best.bins <= 130 && identity_gap < 1e-10;
}

// ---- criterion 7 -----------------------------------------------------------

double batch_means_se(const std::vector<double>& indicator, int batches) {
    const std::size_t batch_size = indicator.size() / static_cast<std::size_t>(batches);
    std::vector<double> means;
    for (int b = 0; b < batches; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < batch_size; ++i)
            sum += indicator[static_cast<std::size_t>(b) * batch_size + i];
        means.push_back(sum / static_cast<double>(batch_size));
    }
    double mean = 0.0;
    for (double m : means)
        mean += m;
    mean /= batches;
    double var = 0.0;
    for (double m : means)
        var += (m - mean) * (m - mean);
    var /= (batches - 1);
    return std::sqrt(var / batches);
}

bool rjmcmc_correctness(std::string& detail) {
    // Prior recovery: with the likelihood switched off the chain must sample
    // the Poisson(1) prior over the number of changepoints.
    ChangepointModel prior_model;
    prior_model.prior_only = true;
    PoissonProcessData empty;
    auto prior_rng = make_stream(707, 0);
    ChangepointConfig state;
    const int steps = 1000000;
    std::vector<double> zero_indicator(steps);
    for (int i = 0; i < steps; ++i) {
        state = rjmcmc_step(state, prior_model, empty, prior_rng);
        zero_indicator[static_cast<std::size_t>(i)] = state.k() == 0 ? 1.0 : 0.0;
    }
    double p_zero = 0.0;
    for (double z : zero_indicator)
        p_zero += z;
    p_zero /= steps;
    const double prior_se = batch_means_se(zero_indicator, 100);
    const double prior_gap = std::fabs(p_zero - std::exp(-1.0));

    // Posterior check on a toy dataset against deterministic quadrature.
    ChangepointModel model;
    model.max_changepoints = 1;
    PoissonProcessData data;
    data.events = {0.2, 0.5, 0.8};

    const double lp0 = config_log_posterior(model, data, ChangepointConfig{});
    std::vector<double> knots{0.0, 0.2, 0.5, 0.8, 1.0};
    double odds = 0.0;
    for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
        const double lo = knots[p];
        const double hi = knots[p + 1];
        const int slices = 200;
        const double h = (hi - lo) / slices;
        auto f = [&](double tau) {
            return std::exp(config_log_posterior(model, data, ChangepointConfig{{tau}}) - lp0);
        };
        double sum = f(lo + 1e-12) + f(hi - 1e-12);
        for (int i = 1; i < slices; ++i)
            sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
        odds += sum * h / 3.0;
    }
    const double quadrature_p1 = odds / (1.0 + odds);

    auto chain_rng = make_stream(707, 1);
    ChangepointConfig chain_state;
    const int chain_steps = 2000000;
    std::vector<double> one_indicator(chain_steps);
    for (int i = 0; i < chain_steps; ++i) {
        chain_state = rjmcmc_step(chain_state, model, data, chain_rng);
        one_indicator[static_cast<std::size_t>(i)] = chain_state.k() == 1 ? 1.0 : 0.0;
    }
    double chain_p1 = 0.0;
    for (double z : one_indicator)
        chain_p1 += z;
    chain_p1 /= chain_steps;
    const double chain_se = batch_means_se(one_indicator, 100);
    const double posterior_gap = std::fabs(chain_p1 - quadrature_p1);

    std::ostringstream out;
    out << "prior P(k=0) " << p_zero << " vs " << std::exp(-1.0) << " (se " << prior_se
        << "), posterior P(k=1) " << chain_p1 << " vs " << quadrature_p1 << " (se "
        << chain_se << ")";
    detail = out.str();
    return prior_gap < 5.0 * prior_se && posterior_gap < 3.0 * chain_se + 1e-4;
}

// ---- criterion 8 -----------------------------------------------------------

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool deterministic_output(std::string& detail) {
    ExperimentConfig config;
    TargetSpec narrow;
    narrow.sd = 1.0;
    TargetSpec wide;
    wide.sd = 2.0;
    config.targets = {narrow, wide};
    config.grid = GridSpec{-10.0, 10.0, 100, true};
    config.strategies = {StrategyKind::Equal, StrategyKind::Grassberger,
                         StrategyKind::Fox};
    config.loss = Loss::Max;
    config.budget = 6000;
    config.minima = {100, 100};
    config.replications = 8;
    config.master_seed = 808;

    const std::filesystem::path base =
        std::filesystem::temp_directory_path() / "rival_acceptance_determinism";
    std::filesystem::remove_all(base);
    emit_results(run_experiment(config, 1), base / "serial");
    emit_results(run_experiment(config, 4), base / "parallel");
    emit_results(run_experiment(config, 4), base / "again");

    bool ok = true;
    for (const char* file : {"summary.csv", "sizes.csv"}) {
        const std::string serial = slurp(base / "serial" / file);
        ok = ok && !serial.empty();
        ok = ok && serial == slurp(base / "parallel" / file);
        ok = ok && serial == slurp(base / "again" / file);
    }
    std::filesystem::remove_all(base);
    detail = ok ? "summary.csv and sizes.csv byte-identical across runs and thread counts"
                : "outputs differ";
    return ok;
}

}  // namespace

int main() {
    run(1, "incremental estimates track batch recomputation", incremental_matches_batch);
    run(2, "expected decrease matches one-step enumeration", one_step_enumeration);
    run(3, "two-Gaussian allocation under max loss", two_gaussians_max_loss);
    run(4, "two-Gaussian allocation under average loss", two_gaussians_ave_loss);
    run(5, "changepoint posterior allocation ordering", changepoint_ordering);
    run(6, "marginal-likelihood bin-width selection", bin_width_selection);
    run(7, "rjmcmc prior recovery and posterior accuracy", rjmcmc_correctness);
    run(8, "deterministic experiment outputs", deterministic_output);
    return failures == 0 ? 0 : 1;
}
