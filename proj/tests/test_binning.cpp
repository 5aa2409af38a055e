#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rival/binning.hpp"
#include "rival/special_functions.hpp"

using namespace rival;

TEST_CASE("bin_value boundaries and tails") {
    const GridSpec grid{-10.0, 10.0, 100, true};
    CHECK(bin_value(grid, -10.0) == BinKey{0});
    CHECK(bin_value(grid, -10.5) == BinKey{-1});
    CHECK(bin_value(grid, 10.5) == BinKey{100});
    CHECK(bin_value(grid, 0.0) == BinKey{50});
    CHECK(bin_value(grid, 10.0) == BinKey{99});  // top clamp

    const GridSpec no_tails{-10.0, 10.0, 100, false};
    CHECK_THROWS_AS(bin_value(no_tails, -10.5), std::domain_error);
    CHECK_THROWS_AS(bin_value(no_tails, 11.0), std::domain_error);
}

TEST_CASE("bin_value monotone and covering") {
    const GridSpec grid{0.0, 1.0, 17, false};
    std::int32_t prev = 0;
    for (double x = 0.0; x <= 1.0; x += 1e-3) {
        const BinKey key = bin_value(grid, x);
        CHECK(key[0] >= prev);
        CHECK(key[0] >= 0);
        CHECK(key[0] < 17);
        prev = key[0];
    }
}

TEST_CASE("bin_config sorts and handles empty configurations") {
    const GridSpec grid{0.0, 1.0, 50, false};
    const std::vector<double> cps{0.7, 0.1};
    CHECK(bin_config(grid, cps) == BinKey{5, 35});
    CHECK(bin_config(grid, std::vector<double>{}) == BinKey{});
    CHECK_THROWS_AS(bin_config(grid, std::vector<double>{1.0}), std::domain_error);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> points;
        for (int i = 0; i < 4; ++i)
            points.push_back(unif(rng));
        std::vector<double> shuffled = points;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(bin_config(grid, points) == bin_config(grid, shuffled));
    }
}

TEST_CASE("histogram log marginal likelihood closed forms") {
    // K = 1 on [0, 1]: uniform density, likelihood 1.
    for (std::int64_t n : {0, 1, 5, 100}) {
        const std::vector<std::int64_t> counts{n};
        CHECK(histogram_log_marginal_likelihood(counts, 2.7, 0.0, 1.0) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    // A single observation collapses to the base density 1/(b - a).
    for (int k : {1, 2, 7, 30}) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
        counts[static_cast<std::size_t>(k / 2)] = 1;
        for (double alpha : {0.01, 1.0, 55.0})
            CHECK(histogram_log_marginal_likelihood(counts, alpha, 0.0, 1.0) ==
                  doctest::Approx(0.0).epsilon(1e-10));
    }
    // K = 2, alpha = 1, two observations: direct gamma evaluation.
    CHECK(histogram_log_marginal_likelihood(std::vector<std::int64_t>{2, 0}, 1.0, 0.0, 1.0) ==
          doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(histogram_log_marginal_likelihood(std::vector<std::int64_t>{1, 1}, 1.0, 0.0, 1.0) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("marginal likelihood invariant under count permutation") {
    const std::vector<std::int64_t> counts{5, 0, 2, 9, 1};
    std::vector<std::int64_t> shuffled = counts;
    std::mt19937_64 rng(6);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(histogram_log_marginal_likelihood(counts, 0.8, -1.0, 3.0) ==
          doctest::Approx(histogram_log_marginal_likelihood(shuffled, 0.8, -1.0, 3.0))
              .epsilon(1e-12));
}

TEST_CASE("optimize_bins single point prefers smallest K") {
    const std::vector<double> data{0.4};
    const BinOptimum best = optimize_bins(data, 0.0, 2.0, 3, 10);
    CHECK(best.bins == 3);
    CHECK(best.log_marginal == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("optimize_bins matches an exhaustive grid scan") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> data;
    for (int i = 0; i < 400; ++i)
        data.push_back(std::clamp(normal(rng), -5.0, 5.0));

    const int k_min = 2, k_max = 25;
    const BinOptimum best = optimize_bins(data, -5.0, 5.0, k_min, k_max);

    // Coarse exhaustive scan over (K, alpha).
    double scan_best = -1e300;
    for (int k = k_min; k <= k_max; ++k) {
        GridSpec grid{-5.0, 5.0, k, false};
        std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
        for (double x : data)
            ++counts[static_cast<std::size_t>(bin_value(grid, x)[0])];
        for (double log_alpha = std::log(1e-3); log_alpha <= std::log(1e3);
             log_alpha += 0.05) {
            scan_best = std::max(scan_best, histogram_log_marginal_likelihood(
                                                counts, std::exp(log_alpha), -5.0, 5.0));
        }
    }
    CHECK(best.log_marginal >= scan_best - 1e-6);
}

TEST_CASE("optimize_bins input validation") {
    CHECK_THROWS_AS(optimize_bins(std::vector<double>{}, 0.0, 1.0, 1, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimize_bins(std::vector<double>{2.0}, 0.0, 1.0, 1, 5),
                    std::invalid_argument);
}
