#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rival/binned_measure.hpp"
#include "rival/sample_source.hpp"

namespace rival {

enum class Loss { Max, Ave };

// Per-sampler adaptive error state: consumes each new sample's insert event
// and exposes the current error level and the expected one-step decrease.
class ErrorCriterion {
public:
    virtual ~ErrorCriterion() = default;

    virtual void observe(const InsertEvent& event, SampleSource& source) = 0;
    virtual double error() const = 0;
    virtual double expected_decrease() const = 0;
};

// Grassberger divergence-error criterion (scalar incremental recurrences).
class GrassbergerCriterion : public ErrorCriterion {
public:
    explicit GrassbergerCriterion(bool second_order = false) : second_order_(second_order) {}

    void observe(const InsertEvent& event, SampleSource& source) override;
    double error() const override { return error_; }
    double expected_decrease() const override { return decrease_; }

private:
    bool second_order_;
    double error_ = 0.0;
    double decrease_ = 0.0;
};

// Chi-square goodness-of-fit criterion: error = chi2_{K-1,1-delta} / (2n).
class FoxCriterion : public ErrorCriterion {
public:
    explicit FoxCriterion(double delta = 0.05) : delta_(delta) {}

    void observe(const InsertEvent& event, SampleSource& source) override;
    double error() const override;
    double expected_decrease() const override;

    std::int64_t nonempty_bins() const { return bins_; }
    std::int64_t total() const { return n_; }

private:
    double epsilon(std::int64_t bins, std::int64_t n) const;

    double delta_;
    std::int64_t bins_ = 0;
    std::int64_t n_ = 0;
};

// Squared-extent criterion, sequentialized as error = exp(2H) / n.
class ExtentCriterion : public ErrorCriterion {
public:
    void observe(const InsertEvent& event, SampleSource& source) override;
    double error() const override;
    double expected_decrease() const override;

private:
    std::int64_t n_ = 0;
    double sum_plogp_ = 0.0;
};

// Odd/even split Jensen-Shannon divergence criterion.
class SplitJsdCriterion : public ErrorCriterion {
public:
    void observe(const InsertEvent& event, SampleSource& source) override;
    double error() const override { return value_; }
    double expected_decrease() const override;

private:
    struct Half {
        std::int64_t n = 0;
        double sum_plogp = 0.0;
        double entropy() const;
    };
    void account(Half& half, const InsertEvent& event, bool full);

    // The full-sample entropy reuses the allocation's measure via the event
    // counts, so only scalar sums are kept for all three distributions.
    Half full_, odd_, even_;
    std::map<BinKey, std::int64_t> odd_counts_, even_counts_;
    bool next_odd_ = true;
    double value_ = 0.0;
};

// Reference-point criterion: sum over a fixed grid of the Monte Carlo
// variances of a fixed-dimension function of the transdimensional sample.
class SissonCriterion : public ErrorCriterion {
public:
    SissonCriterion(FunctionOfInterest kind, std::vector<double> reference_points);
    explicit SissonCriterion(FunctionOfInterest kind)
        : SissonCriterion(kind, uniform_reference_points(100)) {}

    void observe(const InsertEvent& event, SampleSource& source) override;
    double error() const override;
    double expected_decrease() const override;

    static std::vector<double> uniform_reference_points(int count);

private:
    struct Welford {
        std::int64_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
        void add(double x);
        double unbiased_variance() const;
    };

    double variance_sum() const;

    FunctionOfInterest kind_;
    std::vector<double> points_;
    std::vector<Welford> stats_;
    std::int64_t n_ = 0;
};

struct AllocationPlan {
    std::int64_t budget = 0;
    std::vector<std::int64_t> minima;  // per-sampler minimum sample counts
    Loss loss = Loss::Max;
    bool record_trace = false;
};

struct AllocationTraceRow {
    std::int64_t step = 0;       // total samples drawn so far (before this draw)
    std::size_t chosen = 0;
    std::vector<double> scores;  // per-sampler error (max loss) or decrease (ave loss)
};

struct AllocationResult {
    std::vector<std::int64_t> sizes;
    std::vector<BinnedMeasure> measures;
    std::vector<AllocationTraceRow> trace;
};

// Greedy one-step rule: argmax of error() under max loss, argmax of
// expected_decrease() under average loss; ties break to the lowest index.
std::size_t choose_next(const std::vector<ErrorCriterion*>& criteria, Loss loss);

// Full rival-sampling run: draws each sampler's minimum first, then feeds
// one sample at a time to the sampler picked by choose_next until the
// budget is spent.
AllocationResult run_allocation(const std::vector<SampleSource*>& samplers,
                                const std::vector<ErrorCriterion*>& criteria,
                                const AllocationPlan& plan);

void write_trace_csv(std::ostream& out, const AllocationResult& result);

}  // namespace rival
