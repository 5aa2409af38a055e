#include "rival/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rival/special_functions.hpp"

namespace rival {

void ChangepointConfig::validate() const {
    double prev = 0.0;
    for (double tau : changepoints) {
        if (!(tau > 0.0 && tau < 1.0))
            throw std::domain_error("ChangepointConfig: location outside (0, 1)");
        if (!(tau > prev))
            throw std::domain_error("ChangepointConfig: locations must be strictly ascending");
        prev = tau;
    }
}

std::int64_t PoissonProcessData::count_in(double lo, double hi) const {
    const auto first = std::lower_bound(events.begin(), events.end(), lo);
    const auto last = std::lower_bound(events.begin(), events.end(), hi);
    return static_cast<std::int64_t>(last - first);
}

void ChangepointModel::validate() const {
    if (!(prior_mean_changepoints > 0.0))
        throw std::invalid_argument("ChangepointModel: nu must be positive");
    if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0))
        throw std::invalid_argument("ChangepointModel: gamma hyperparameters must be positive");
}

PoissonProcessData simulate_poisson_process(std::span<const double> breaks,
                                            std::span<const double> levels,
                                            std::mt19937_64& rng) {
    if (levels.size() != breaks.size() + 1)
        throw std::invalid_argument("simulate_poisson_process: need one level per segment");
    PoissonProcessData data;
    double lo = 0.0;
    for (std::size_t s = 0; s < levels.size(); ++s) {
        const double hi = s < breaks.size() ? breaks[s] : data.horizon;
        if (!(hi > lo) || hi > data.horizon)
            throw std::invalid_argument("simulate_poisson_process: breaks must ascend in (0, 1)");
        if (levels[s] < 0.0)
            throw std::invalid_argument("simulate_poisson_process: negative intensity");
        const double len = hi - lo;
        if (levels[s] > 0.0) {
            std::poisson_distribution<std::int64_t> count_dist(levels[s] * len);
            const std::int64_t count = count_dist(rng);
            std::uniform_real_distribution<double> time_dist(lo, hi);
            for (std::int64_t i = 0; i < count; ++i)
                data.events.push_back(time_dist(rng));
        }
        lo = hi;
    }
    std::sort(data.events.begin(), data.events.end());
    return data;
}

namespace {

// Evidence of one segment [lo, hi) with the intensity integrated out.
double segment_log_evidence(const ChangepointModel& model, const PoissonProcessData& data,
                            double lo, double hi, bool last) {
    const double a = model.gamma_shape;
    const double b = model.gamma_rate;
    const double len = hi - lo;
    const std::int64_t c = last ? static_cast<std::int64_t>(data.events.end() -
                                      std::lower_bound(data.events.begin(), data.events.end(), lo))
                                : data.count_in(lo, hi);
    return a * std::log(b) - log_gamma(a) + log_gamma(a + static_cast<double>(c)) -
           (a + static_cast<double>(c)) * std::log(b + len);
}

}  // namespace

double config_log_posterior(const ChangepointModel& model, const PoissonProcessData& data,
                            const ChangepointConfig& config) {
    config.validate();
    const double nu = model.prior_mean_changepoints;
    // Poisson(nu) on k with uniform order statistics for the locations; the
    // k! factors cancel.
    double log_post = -nu + static_cast<double>(config.k()) * std::log(nu);
    if (model.prior_only)
        return log_post;
    double lo = 0.0;
    for (std::size_t i = 0; i <= config.k(); ++i) {
        const bool last = i == config.k();
        const double hi = last ? data.horizon : config.changepoints[i];
        log_post += segment_log_evidence(model, data, lo, hi, last);
        lo = hi;
    }
    return log_post;
}

namespace {

bool contains(const std::vector<double>& sorted, double x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

ChangepointConfig rjmcmc_step(const ChangepointConfig& state, const ChangepointModel& model,
                              const PoissonProcessData& data, std::mt19937_64& rng,
                              double* log_post) {
    const std::size_t k = state.k();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double current_lp = log_post ? *log_post : config_log_posterior(model, data, state);

    // Move kinds: birth / death / move at 1/3 each; at k = 0 the death mass
    // is split equally between birth and the (no-op) move.
    enum class Kind { Birth, Death, Move };
    Kind kind;
    double p_birth_here;  // birth proposal probability from the current state
    const double u = unif(rng);
    if (k == 0) {
        p_birth_here = 0.5;
        kind = u < 0.5 ? Kind::Birth : Kind::Move;
    } else {
        p_birth_here = 1.0 / 3.0;
        kind = u < 1.0 / 3.0 ? Kind::Birth : (u < 2.0 / 3.0 ? Kind::Death : Kind::Move);
    }

    auto accept = [&](const ChangepointConfig& proposal, double log_ratio) {
        const double proposal_lp = config_log_posterior(model, data, proposal);
        const double log_alpha = proposal_lp - current_lp + log_ratio;
        if (log_alpha >= 0.0 || std::log(unif(rng)) < log_alpha) {
            if (log_post)
                *log_post = proposal_lp;
            return true;
        }
        return false;
    };

    switch (kind) {
        case Kind::Birth: {
            if (model.max_changepoints >= 0 &&
                static_cast<int>(k) >= model.max_changepoints)
                break;
            const double tau = unif(rng);
            if (tau <= 0.0 || tau >= 1.0 || contains(state.changepoints, tau))
                break;
            ChangepointConfig proposal = state;
            proposal.changepoints.insert(
                std::upper_bound(proposal.changepoints.begin(), proposal.changepoints.end(), tau),
                tau);
            // Reverse move deletes one of k + 1 points with probability 1/3.
            const double log_ratio =
                std::log((1.0 / 3.0) / static_cast<double>(k + 1)) - std::log(p_birth_here);
            if (accept(proposal, log_ratio))
                return proposal;
            break;
        }
        case Kind::Death: {
            std::uniform_int_distribution<std::size_t> pick(0, k - 1);
            const std::size_t idx = pick(rng);
            ChangepointConfig proposal = state;
            proposal.changepoints.erase(proposal.changepoints.begin() +
                                        static_cast<std::ptrdiff_t>(idx));
            const double p_birth_back = k == 1 ? 0.5 : 1.0 / 3.0;
            const double log_ratio =
                std::log(p_birth_back) - std::log((1.0 / 3.0) / static_cast<double>(k));
            if (accept(proposal, log_ratio))
                return proposal;
            break;
        }
        case Kind::Move: {
            if (k == 0)
                break;
            std::uniform_int_distribution<std::size_t> pick(0, k - 1);
            const std::size_t idx = pick(rng);
            const double lo = idx > 0 ? state.changepoints[idx - 1] : 0.0;
            const double hi = idx + 1 < k ? state.changepoints[idx + 1] : 1.0;
            std::uniform_real_distribution<double> within(lo, hi);
            const double tau = within(rng);
            if (tau <= lo || tau >= hi)
                break;
            ChangepointConfig proposal = state;
            proposal.changepoints[idx] = tau;
            if (accept(proposal, 0.0))  // symmetric proposal
                return proposal;
            break;
        }
    }
    if (log_post)
        *log_post = current_lp;
    return state;
}

double nearest_changepoint_distance(const ChangepointConfig& config, double t) {
    if (config.changepoints.empty())
        return 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (double tau : config.changepoints)
        best = std::min(best, std::fabs(t - tau));
    return best;
}

double intensity_draw(const ChangepointModel& model, const PoissonProcessData& data,
                      const ChangepointConfig& config, double t, std::mt19937_64& rng) {
    const auto& cps = config.changepoints;
    const auto next = std::upper_bound(cps.begin(), cps.end(), t);
    const double lo = next == cps.begin() ? 0.0 : *(next - 1);
    const double hi = next == cps.end() ? data.horizon : *next;
    const bool last = next == cps.end();
    const std::int64_t c = last ? static_cast<std::int64_t>(data.events.end() -
                                      std::lower_bound(data.events.begin(), data.events.end(), lo))
                                : data.count_in(lo, hi);
    std::gamma_distribution<double> gamma(model.gamma_shape + static_cast<double>(c),
                                          1.0 / (model.gamma_rate + (hi - lo)));
    return gamma(rng);
}

std::pair<double, double> functions_of_interest(const ChangepointConfig& config,
                                                const PoissonProcessData& data,
                                                const ChangepointModel& model, double t,
                                                std::mt19937_64& rng) {
    if (t < 0.0 || t > 1.0)
        throw std::domain_error("functions_of_interest: reference point outside [0, 1]");
    return {nearest_changepoint_distance(config, t),
            intensity_draw(model, data, config, t, rng)};
}

GaussianSampler::GaussianSampler(double mean, double sd, GridSpec grid, std::mt19937_64 rng)
    : mean_(mean), sd_(sd), grid_(grid), rng_(std::move(rng)) {
    if (!(sd > 0.0))
        throw std::invalid_argument("GaussianSampler: sd must be positive");
    grid_.validate();
}

BinKey GaussianSampler::draw() {
    last_value_ = mean_ + sd_ * normal_(rng_);
    return bin_value(grid_, last_value_);
}

std::vector<double> GaussianSampler::reference_values(FunctionOfInterest,
                                                      std::span<const double>) {
    throw std::logic_error("GaussianSampler: no point-process functions of interest");
}

ChangepointSampler::ChangepointSampler(ChangepointModel model, PoissonProcessData data,
                                       GridSpec grid, int thin, std::mt19937_64 chain_rng,
                                       std::mt19937_64 foi_rng)
    : model_(model),
      data_(std::move(data)),
      grid_(grid),
      thin_(thin),
      chain_rng_(std::move(chain_rng)),
      foi_rng_(std::move(foi_rng)) {
    model_.validate();
    grid_.validate();
    if (thin_ < 1)
        throw std::invalid_argument("ChangepointSampler: thin factor must be >= 1");
    log_post_ = config_log_posterior(model_, data_, state_);
}

BinKey ChangepointSampler::draw() {
    for (int i = 0; i < thin_; ++i)
        state_ = rjmcmc_step(state_, model_, data_, chain_rng_, &log_post_);
    return bin_config(grid_, state_.changepoints);
}

std::vector<double> ChangepointSampler::reference_values(FunctionOfInterest kind,
                                                         std::span<const double> points) {
    std::vector<double> values;
    values.reserve(points.size());
    for (double t : points) {
        if (kind == FunctionOfInterest::NearestChangepointDistance)
            values.push_back(nearest_changepoint_distance(state_, t));
        else
            values.push_back(intensity_draw(model_, data_, state_, t, foi_rng_));
    }
    return values;
}

PoissonProcessData read_event_data(std::istream& in) {
    PoissonProcessData data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        data.events.push_back(std::stod(line));
    }
    for (std::size_t i = 0; i < data.events.size(); ++i) {
        if (data.events[i] < 0.0 || data.events[i] > data.horizon)
            throw std::runtime_error("read_event_data: event outside [0, 1]");
        if (i > 0 && data.events[i] < data.events[i - 1])
            throw std::runtime_error("read_event_data: events must be ascending");
    }
    return data;
}

void write_event_data(std::ostream& out, const PoissonProcessData& data) {
    out.precision(17);
    for (double t : data.events)
        out << t << '\n';
}

void write_configs(std::ostream& out, std::span<const ChangepointConfig> configs) {
    out.precision(17);
    for (const ChangepointConfig& config : configs) {
        out << config.k() << ';';
        for (std::size_t i = 0; i < config.k(); ++i) {
            if (i)
                out << ',';
            out << config.changepoints[i];
        }
        out << '\n';
    }
}

std::vector<ChangepointConfig> read_configs(std::istream& in) {
    std::vector<ChangepointConfig> configs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const std::size_t semi = line.find(';');
        if (semi == std::string::npos)
            throw std::runtime_error("read_configs: missing ';'");
        ChangepointConfig config;
        std::stringstream ss(line.substr(semi + 1));
        std::string field;
        while (std::getline(ss, field, ','))
            config.changepoints.push_back(std::stod(field));
        if (config.k() != static_cast<std::size_t>(std::stoul(line.substr(0, semi))))
            throw std::runtime_error("read_configs: k does not match location count");
        config.validate();
        configs.push_back(std::move(config));
    }
    return configs;
}

}  // namespace rival
