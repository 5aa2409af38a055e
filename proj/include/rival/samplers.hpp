#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "rival/binning.hpp"
#include "rival/sample_source.hpp"

namespace rival {

// Variable-dimension sample from the changepoint posterior: strictly
// ascending locations in the open interval (0, 1).
struct ChangepointConfig {
    std::vector<double> changepoints;

    std::size_t k() const { return changepoints.size(); }
    void validate() const;
};

struct PoissonProcessData {
    std::vector<double> events;  // ascending, within [0, horizon]
    double horizon = 1.0;

    // Number of events in [lo, hi).
    std::int64_t count_in(double lo, double hi) const;
};

struct ChangepointModel {
    double prior_mean_changepoints = 1.0;  // nu
    double gamma_shape = 1.0;              // a
    double gamma_rate = 1.0;               // b
    int max_changepoints = -1;             // < 0 means unbounded
    bool prior_only = false;               // drop the data evidence term

    void validate() const;
};

// Piecewise-constant-intensity Poisson process on [0, 1]: per-segment
// Poisson counts with uniform event times, merged ascending.
PoissonProcessData simulate_poisson_process(std::span<const double> breaks,
                                            std::span<const double> levels,
                                            std::mt19937_64& rng);

// Log posterior density of a configuration with segment intensities
// marginalized out by gamma-Poisson conjugacy. The prior on k is
// Poisson(nu) with locations as uniform order statistics.
double config_log_posterior(const ChangepointModel& model, const PoissonProcessData& data,
                            const ChangepointConfig& config);

// One reversible-jump step: birth, death, or move, each with probability
// 1/3 (death mass folded into the others at k = 0), accepted by the
// Metropolis-Hastings ratio. When log_post is non-null it must hold the
// current state's log posterior on entry and receives the new one.
ChangepointConfig rjmcmc_step(const ChangepointConfig& state, const ChangepointModel& model,
                              const PoissonProcessData& data, std::mt19937_64& rng,
                              double* log_post = nullptr);

// Distance from t to the nearest changepoint; 1.0 (the domain length) for
// empty configurations.
double nearest_changepoint_distance(const ChangepointConfig& config, double t);

// Draw from the conditional Gamma(a + c_s, b + L_s) intensity of the
// segment containing t.
double intensity_draw(const ChangepointModel& model, const PoissonProcessData& data,
                      const ChangepointConfig& config, double t, std::mt19937_64& rng);

std::pair<double, double> functions_of_interest(const ChangepointConfig& config,
                                                const PoissonProcessData& data,
                                                const ChangepointModel& model, double t,
                                                std::mt19937_64& rng);

// Seeded univariate Gaussian source.
class GaussianSampler : public SampleSource {
public:
    GaussianSampler(double mean, double sd, GridSpec grid, std::mt19937_64 rng);

    BinKey draw() override;
    std::vector<double> reference_values(FunctionOfInterest kind,
                                         std::span<const double> points) override;

    double last_value() const { return last_value_; }

private:
    double mean_;
    double sd_;
    GridSpec grid_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    double last_value_ = 0.0;
};

// Thinned marginalized RJMCMC source for the changepoint posterior. The
// function-of-interest stream is separate from the chain stream so that the
// chain trajectory does not depend on whether reference values are read.
class ChangepointSampler : public SampleSource {
public:
    ChangepointSampler(ChangepointModel model, PoissonProcessData data, GridSpec grid,
                       int thin, std::mt19937_64 chain_rng, std::mt19937_64 foi_rng);

    BinKey draw() override;
    std::vector<double> reference_values(FunctionOfInterest kind,
                                         std::span<const double> points) override;

    const ChangepointConfig& state() const { return state_; }

private:
    ChangepointModel model_;
    PoissonProcessData data_;
    GridSpec grid_;
    int thin_;
    ChangepointConfig state_;
    double log_post_;
    std::mt19937_64 chain_rng_;
    std::mt19937_64 foi_rng_;
};

// Event-data files: newline-separated ascending reals in [0, 1].
PoissonProcessData read_event_data(std::istream& in);
void write_event_data(std::ostream& out, const PoissonProcessData& data);

// Sample dumps: one configuration per line, "k;tau1,tau2,...".
void write_configs(std::ostream& out, std::span<const ChangepointConfig> configs);
std::vector<ChangepointConfig> read_configs(std::istream& in);

}  // namespace rival
