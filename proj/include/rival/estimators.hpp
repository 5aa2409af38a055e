#pragma once

#include <cstdint>

#include "rival/binned_measure.hpp"

namespace rival {

// Grassberger bias term phi(n) = n (ln n - psi(n)), with phi(0) = 0.
// The second-order variant subtracts (-1)^n / (n + 1).
double grassberger_phi(std::int64_t count, bool second_order = false);

// First-order phi with a thread-local memo table for small counts.
double phi_cached(std::int64_t count);

// Scalar one-insert recurrences. prev_count is the bin's count before the
// insert, new_total the measure total after it.
double grassberger_error_update(double prev_error, std::int64_t prev_count,
                                std::int64_t new_total, bool second_order = false);
double grassberger_decrease_update(double prev_decrease, std::int64_t prev_count,
                                   std::int64_t new_total);

// Divergence-error estimator state: current error estimate e_n and expected
// one-step decrease d_n, maintained incrementally alongside the measure.
struct GrassbergerState {
    BinnedMeasure measure;
    double error = 0.0;
    double decrease = 0.0;
    bool second_order = false;

    // Insert a sample and refresh both estimates.
    InsertEvent observe(const BinKey& key);
};

// Incremental updates from an event produced by state.measure. Throw if the
// event is stale (new_total does not match the measure).
double grassberger_error(GrassbergerState& state, const InsertEvent& event);
double grassberger_decrease(GrassbergerState& state, const InsertEvent& event);

// Batch forms, recomputed from the count table.
double grassberger_error_batch(const BinnedMeasure& measure, bool second_order = false);
double grassberger_decrease_batch(const BinnedMeasure& measure);

// Miller-Madow bias estimate (K - 1) / (2n).
double miller_madow(const BinnedMeasure& measure);

// Squared extent exp(2 H).
double extent_squared(const BinnedMeasure& measure);

// Divergence between the empirical distributions of the odd- and
// even-indexed halves of one sample stream.
struct SplitJsdState {
    BinnedMeasure full;
    BinnedMeasure odd;
    BinnedMeasure even;
    bool next_odd = true;
};

// Inserts the key into the full measure and the current half, toggles the
// parity, and returns H(full) - (H(odd) + H(even)) / 2.
double split_jsd_error(SplitJsdState& state, const BinKey& key);

// Current value without inserting.
double split_jsd_value(const SplitJsdState& state);

}  // namespace rival
