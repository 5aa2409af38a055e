#include "rival/binning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rival/special_functions.hpp"

namespace rival {

void GridSpec::validate() const {
    if (!(lower < upper))
        throw std::invalid_argument("GridSpec: lower edge must be below upper edge");
    if (bins < 1)
        throw std::invalid_argument("GridSpec: need at least one bin");
}

namespace {

std::int32_t interior_index(const GridSpec& grid, double x) {
    const std::int32_t i =
        static_cast<std::int32_t>(std::floor((x - grid.lower) / grid.width()));
    return std::clamp(i, std::int32_t{0}, static_cast<std::int32_t>(grid.bins - 1));
}

}  // namespace

BinKey bin_value(const GridSpec& grid, double x) {
    if (x < grid.lower) {
        if (!grid.tails)
            throw std::domain_error("bin_value: value below grid with tails disabled");
        return BinKey{-1};
    }
    if (x > grid.upper) {
        if (!grid.tails)
            throw std::domain_error("bin_value: value above grid with tails disabled");
        return BinKey{static_cast<std::int32_t>(grid.bins)};
    }
    return BinKey{interior_index(grid, x)};
}

BinKey bin_config(const GridSpec& grid, std::span<const double> changepoints) {
    BinKey key;
    for (double tau : changepoints) {
        if (tau < grid.lower || tau >= grid.upper)
            throw std::domain_error("bin_config: changepoint outside grid");
        key.push_back(interior_index(grid, tau));
    }
    std::sort(key.begin(), key.end());
    return key;
}

double histogram_log_marginal_likelihood(std::span<const std::int64_t> counts,
                                         double alpha, double a, double b) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("histogram_log_marginal_likelihood: alpha must be positive");
    if (!(a < b))
        throw std::invalid_argument("histogram_log_marginal_likelihood: need a < b");
    const double k = static_cast<double>(counts.size());
    const double c = alpha * (b - a);
    std::int64_t n = 0;
    double sum = 0.0;
    for (std::int64_t count : counts) {
        n += count;
        sum += log_gamma(c / k + static_cast<double>(count));
    }
    return log_gamma(c) - log_gamma(c + static_cast<double>(n)) - k * log_gamma(c / k) -
           static_cast<double>(n) * std::log((b - a) / k) + sum;
}

namespace {

std::vector<std::int64_t> bin_counts(std::span<const double> data, double a, double b, int k) {
    GridSpec grid{a, b, k, false};
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
    for (double x : data)
        ++counts[static_cast<std::size_t>(bin_value(grid, x)[0])];
    return counts;
}

// Golden-section maximization of the log marginal likelihood over ln alpha.
std::pair<double, double> best_alpha(std::span<const std::int64_t> counts, double a, double b,
                                     double alpha_min, double alpha_max) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(alpha_min);
    double hi = std::log(alpha_max);
    auto eval = [&](double log_alpha) {
        return histogram_log_marginal_likelihood(counts, std::exp(log_alpha), a, b);
    };
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (hi - lo > 1e-8) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = eval(x1);
        }
    }
    const double log_alpha = 0.5 * (lo + hi);
    return {std::exp(log_alpha), eval(log_alpha)};
}

}  // namespace

BinOptimum optimize_bins(std::span<const double> data, double a, double b,
                         int k_min, int k_max, double alpha_min, double alpha_max) {
    if (data.empty())
        throw std::invalid_argument("optimize_bins: no data");
    if (k_min < 1 || k_max < k_min)
        throw std::invalid_argument("optimize_bins: invalid bin-count range");
    if (!(alpha_min > 0.0) || !(alpha_max >= alpha_min))
        throw std::invalid_argument("optimize_bins: invalid alpha range");
    for (double x : data)
        if (x < a || x > b)
            throw std::invalid_argument("optimize_bins: data outside [a, b]");

    BinOptimum best;
    bool first = true;
    for (int k = k_min; k <= k_max; ++k) {
        const auto counts = bin_counts(data, a, b, k);
        const auto [alpha, logml] = best_alpha(counts, a, b, alpha_min, alpha_max);
        // Near-ties keep the coarser grid so exact analytic ties (for example
        // a single observation) resolve to the smallest bin count.
        const double tie = 1e-9 * std::max(1.0, std::fabs(best.log_marginal));
        if (first || logml > best.log_marginal + tie) {
            best = BinOptimum{k, alpha, logml};
            first = false;
        }
    }
    return best;
}

}  // namespace rival
