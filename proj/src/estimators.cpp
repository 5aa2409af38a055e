#include "rival/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rival/special_functions.hpp"

namespace rival {

double grassberger_phi(std::int64_t count, bool second_order) {
    if (count < 0)
        throw std::domain_error("grassberger_phi: negative count");
    if (count == 0)
        return 0.0;
    const double n = static_cast<double>(count);
    double value = n * (std::log(n) - digamma(n));
    if (second_order)
        value -= (count % 2 == 0 ? 1.0 : -1.0) / (n + 1.0);
    return value;
}

double phi_cached(std::int64_t count) {
    static constexpr std::int64_t kCacheLimit = 1 << 20;
    if (count <= 0)
        return 0.0;
    if (count >= kCacheLimit)
        return grassberger_phi(count);
    thread_local std::vector<double> table{0.0};
    while (static_cast<std::int64_t>(table.size()) <= count)
        table.push_back(grassberger_phi(static_cast<std::int64_t>(table.size())));
    return table[count];
}

namespace {

double phi(std::int64_t count, bool second_order) {
    return second_order ? grassberger_phi(count, true) : phi_cached(count);
}

}  // namespace

double grassberger_error_update(double prev_error, std::int64_t prev_count,
                                std::int64_t new_total, bool second_order) {
    const double n = static_cast<double>(new_total);
    const std::int64_t c = prev_count + 1;
    return ((n - 1.0) * prev_error + phi(c, second_order) - phi(c - 1, second_order)) / n;
}

double grassberger_decrease_update(double prev_decrease, std::int64_t prev_count,
                                   std::int64_t new_total) {
    const double n = static_cast<double>(new_total);
    const std::int64_t c = prev_count + 1;
    const double d2 = phi_cached(c + 1) - 2.0 * phi_cached(c) + phi_cached(c - 1);
    return ((n - 1.0) * n * prev_decrease - static_cast<double>(c) * d2) / (n * (n + 1.0));
}

InsertEvent GrassbergerState::observe(const BinKey& key) {
    const InsertEvent event = measure.insert(key);
    error = grassberger_error_update(error, event.previous_count, event.new_total, second_order);
    decrease = grassberger_decrease_update(decrease, event.previous_count, event.new_total);
    return event;
}

namespace {

void check_event(const GrassbergerState& state, const InsertEvent& event) {
    if (event.new_total != state.measure.total())
        throw std::logic_error("grassberger update: stale insert event");
}

}  // namespace

double grassberger_error(GrassbergerState& state, const InsertEvent& event) {
    check_event(state, event);
    state.error = grassberger_error_update(state.error, event.previous_count,
                                           event.new_total, state.second_order);
    return state.error;
}

double grassberger_decrease(GrassbergerState& state, const InsertEvent& event) {
    check_event(state, event);
    state.decrease =
        grassberger_decrease_update(state.decrease, event.previous_count, event.new_total);
    return state.decrease;
}

double grassberger_error_batch(const BinnedMeasure& measure, bool second_order) {
    double sum = 0.0;
    for (const auto& [key, count] : measure.counts())
        sum += grassberger_phi(count, second_order);
    return sum / static_cast<double>(measure.total());
}

double grassberger_decrease_batch(const BinnedMeasure& measure) {
    const double n = static_cast<double>(measure.total());
    double sum = 0.0;
    for (const auto& [key, count] : measure.counts())
        sum += (count + 1) * grassberger_phi(count) - count * grassberger_phi(count + 1);
    return sum / (n * (n + 1.0));
}

double miller_madow(const BinnedMeasure& measure) {
    if (measure.total() < 1)
        throw std::domain_error("miller_madow: measure is empty");
    return static_cast<double>(measure.nonempty_bins() - 1) /
           (2.0 * static_cast<double>(measure.total()));
}

double extent_squared(const BinnedMeasure& measure) {
    return std::exp(2.0 * measure.entropy());
}

double split_jsd_value(const SplitJsdState& state) {
    if (state.full.total() < 1)
        return 0.0;
    const double h_odd = state.odd.total() > 0 ? state.odd.entropy() : 0.0;
    const double h_even = state.even.total() > 0 ? state.even.entropy() : 0.0;
    const double value = state.full.entropy() - 0.5 * (h_odd + h_even);
    return value < 0.0 ? 0.0 : value;
}

double split_jsd_error(SplitJsdState& state, const BinKey& key) {
    state.full.insert(key);
    if (state.next_odd)
        state.odd.insert(key);
    else
        state.even.insert(key);
    state.next_odd = !state.next_odd;
    return split_jsd_value(state);
}

}  // namespace rival
