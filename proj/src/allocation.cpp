#include "rival/allocation.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rival/estimators.hpp"
#include "rival/special_functions.hpp"

namespace rival {

void GrassbergerCriterion::observe(const InsertEvent& event, SampleSource&) {
    error_ = grassberger_error_update(error_, event.previous_count, event.new_total,
                                      second_order_);
    decrease_ = grassberger_decrease_update(decrease_, event.previous_count, event.new_total);
}

void FoxCriterion::observe(const InsertEvent& event, SampleSource&) {
    if (event.previous_count == 0)
        ++bins_;
    n_ = event.new_total;
}

double FoxCriterion::epsilon(std::int64_t bins, std::int64_t n) const {
    if (bins <= 1)
        return 0.0;
    return chi_square_quantile_cached(static_cast<int>(bins - 1), 1.0 - delta_) /
           (2.0 * static_cast<double>(n));
}

double FoxCriterion::error() const {
    return epsilon(bins_, n_);
}

double FoxCriterion::expected_decrease() const {
    if (n_ < 2)
        return 0.0;
    // Empirical probability that the next sample opens a new bin.
    const double p_new = static_cast<double>(bins_ - 1) / static_cast<double>(n_ - 1);
    const double expected_next =
        p_new * epsilon(bins_ + 1, n_ + 1) + (1.0 - p_new) * epsilon(bins_, n_ + 1);
    const double decrease = error() - expected_next;
    return decrease < 0.0 ? 0.0 : decrease;
}

void ExtentCriterion::observe(const InsertEvent& event, SampleSource&) {
    const std::int64_t c = event.previous_count + 1;
    const double add = static_cast<double>(c) * std::log(static_cast<double>(c));
    const double sub = c > 1 ? static_cast<double>(c - 1) * std::log(static_cast<double>(c - 1))
                             : 0.0;
    sum_plogp_ += add - sub;
    n_ = event.new_total;
}

double ExtentCriterion::error() const {
    if (n_ < 1)
        return 0.0;
    const double n = static_cast<double>(n_);
    const double h = std::max(0.0, std::log(n) - sum_plogp_ / n);
    return std::exp(2.0 * h) / n;
}

double ExtentCriterion::expected_decrease() const {
    if (n_ < 1)
        return 0.0;
    const double n = static_cast<double>(n_);
    return error() * (1.0 - n / (n + 1.0));
}

double SplitJsdCriterion::Half::entropy() const {
    if (n < 1)
        return 0.0;
    const double h = std::log(static_cast<double>(n)) - sum_plogp / static_cast<double>(n);
    return h < 0.0 ? 0.0 : h;
}

void SplitJsdCriterion::observe(const InsertEvent& event, SampleSource&) {
    auto bump = [](Half& half, std::int64_t prev) {
        const std::int64_t c = prev + 1;
        half.sum_plogp += static_cast<double>(c) * std::log(static_cast<double>(c));
        if (prev > 0)
            half.sum_plogp -=
                static_cast<double>(prev) * std::log(static_cast<double>(prev));
        ++half.n;
    };
    bump(full_, event.previous_count);
    if (next_odd_)
        bump(odd_, odd_counts_[event.key]++);
    else
        bump(even_, even_counts_[event.key]++);
    next_odd_ = !next_odd_;
    const double v = full_.entropy() - 0.5 * (odd_.entropy() + even_.entropy());
    value_ = v < 0.0 ? 0.0 : v;
}

double SplitJsdCriterion::expected_decrease() const {
    // The half-vs-half divergence of an i.i.d. sample decays as 1/n, so the
    // one-step decrease is approximately e / (n + 1).
    return value_ / static_cast<double>(full_.n + 1);
}

void SissonCriterion::Welford::add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

double SissonCriterion::Welford::unbiased_variance() const {
    return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1);
}

SissonCriterion::SissonCriterion(FunctionOfInterest kind, std::vector<double> reference_points)
    : kind_(kind), points_(std::move(reference_points)), stats_(points_.size()) {
    if (points_.empty())
        throw std::invalid_argument("SissonCriterion: need at least one reference point");
}

std::vector<double> SissonCriterion::uniform_reference_points(int count) {
    std::vector<double> points(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        points[static_cast<std::size_t>(i)] =
            count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
    return points;
}

void SissonCriterion::observe(const InsertEvent&, SampleSource& source) {
    const std::vector<double> values = source.reference_values(kind_, points_);
    if (values.size() != stats_.size())
        throw std::logic_error("SissonCriterion: reference value count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        stats_[i].add(values[i]);
    ++n_;
}

double SissonCriterion::variance_sum() const {
    double sum = 0.0;
    for (const Welford& w : stats_)
        sum += w.unbiased_variance();
    return sum;
}

double SissonCriterion::error() const {
    if (n_ < 2)
        return 0.0;
    return variance_sum() / static_cast<double>(n_);
}

double SissonCriterion::expected_decrease() const {
    if (n_ < 2)
        return 0.0;
    const double n = static_cast<double>(n_);
    return variance_sum() * (1.0 / n - 1.0 / (n + 1.0));
}

std::size_t choose_next(const std::vector<ErrorCriterion*>& criteria, Loss loss) {
    if (criteria.empty())
        throw std::invalid_argument("choose_next: no criteria");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < criteria.size(); ++j) {
        const double score =
            loss == Loss::Max ? criteria[j]->error() : criteria[j]->expected_decrease();
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

AllocationResult run_allocation(const std::vector<SampleSource*>& samplers,
                                const std::vector<ErrorCriterion*>& criteria,
                                const AllocationPlan& plan) {
    const std::size_t m = samplers.size();
    if (m == 0 || criteria.size() != m)
        throw std::invalid_argument("run_allocation: samplers and criteria must match");
    if (plan.minima.size() != m)
        throw std::invalid_argument("run_allocation: need one minimum per sampler");
    std::int64_t minimum_total = 0;
    for (std::int64_t minimum : plan.minima) {
        if (minimum < 1)
            throw std::invalid_argument("run_allocation: minima must be >= 1");
        minimum_total += minimum;
    }
    if (plan.budget < minimum_total)
        throw std::invalid_argument("run_allocation: budget below the sum of minima");

    AllocationResult result;
    result.sizes.assign(m, 0);
    result.measures.resize(m);

    auto draw_into = [&](std::size_t j) {
        const BinKey key = samplers[j]->draw();
        const InsertEvent event = result.measures[j].insert(key);
        criteria[j]->observe(event, *samplers[j]);
        ++result.sizes[j];
    };

    // Phase 1: per-sampler minima.
    for (std::size_t j = 0; j < m; ++j)
        for (std::int64_t i = 0; i < plan.minima[j]; ++i)
            draw_into(j);

    // Phase 2: greedy one-step allocation.
    std::int64_t total = minimum_total;
    while (total < plan.budget) {
        const std::size_t chosen = choose_next(criteria, plan.loss);
        if (plan.record_trace) {
            AllocationTraceRow row;
            row.step = total;
            row.chosen = chosen;
            row.scores.reserve(m);
            for (std::size_t j = 0; j < m; ++j)
                row.scores.push_back(plan.loss == Loss::Max ? criteria[j]->error()
                                                            : criteria[j]->expected_decrease());
            result.trace.push_back(std::move(row));
        }
        draw_into(chosen);
        ++total;
    }
    return result;
}

void write_trace_csv(std::ostream& out, const AllocationResult& result) {
    out << "step,chosen";
    for (std::size_t j = 0; j < result.sizes.size(); ++j)
        out << ",score_" << j;
    out << '\n';
    out.precision(17);
    for (const AllocationTraceRow& row : result.trace) {
        out << row.step << ',' << row.chosen;
        for (double score : row.scores)
            out << ',' << score;
        out << '\n';
    }
}

}  // namespace rival
