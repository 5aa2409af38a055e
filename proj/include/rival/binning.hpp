#pragma once

#include <cstdint>
#include <span>

#include "rival/binned_measure.hpp"

namespace rival {

// Equal-width discretization rule on [lower, upper] with `bins` interior
// bins; when `tails` is set, values outside the range map to two unbounded
// tail bins (indices -1 and bins).
struct GridSpec {
    double lower = 0.0;
    double upper = 1.0;
    int bins = 1;
    bool tails = false;

    double width() const { return (upper - lower) / bins; }
    void validate() const;
};

// Maps a value to its bin. Interior bins are right-open, with x == upper
// clamped into the last interior bin.
BinKey bin_value(const GridSpec& grid, double x);

// Maps a changepoint configuration (list of locations in [lower, upper))
// to the ascending-sorted sequence of interior indices; empty key for k = 0.
BinKey bin_config(const GridSpec& grid, std::span<const double> changepoints);

// Log marginal likelihood of bin counts under the Bayesian regular
// histogram on [a, b] with a Dirichlet(alpha (b - a) / K) prior.
double histogram_log_marginal_likelihood(std::span<const std::int64_t> counts,
                                         double alpha, double a, double b);

struct BinOptimum {
    int bins = 0;
    double alpha = 0.0;
    double log_marginal = 0.0;
};

// Jointly maximizes the log marginal likelihood over the bin count (grid
// scan) and alpha (golden-section search on ln alpha). Ties prefer the
// smallest bin count.
BinOptimum optimize_bins(std::span<const double> data, double a, double b,
                         int k_min, int k_max,
                         double alpha_min = 1e-3, double alpha_max = 1e3);

}  // namespace rival
