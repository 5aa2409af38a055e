#pragma once

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace rival {

// Discrete bin identifier. Univariate samples use a single index (with two
// distinguished tail indices); changepoint configurations use the
// ascending-sorted per-changepoint indices, empty for k = 0.
using BinKey = boost::container::small_vector<std::int32_t, 4>;

struct InsertEvent {
    BinKey key;
    std::int64_t previous_count = 0;  // count in the bin before insertion
    std::int64_t new_total = 0;       // n after insertion
};

// Binned empirical measure with running sums maintained in O(1) per insert:
//   sum_plogp = sum n_i ln n_i
//   sum_phi   = sum phi(n_i),  phi(n) = n (ln n - psi(n))
//   sum_t     = sum (n_i + 1) phi(n_i) - n_i phi(n_i + 1)
class BinnedMeasure {
public:
    InsertEvent insert(const BinKey& key);

    std::int64_t total() const { return n_; }
    std::int64_t nonempty_bins() const { return static_cast<std::int64_t>(counts_.size()); }
    double sum_plogp() const { return sum_plogp_; }
    double sum_phi() const { return sum_phi_; }
    double sum_t() const { return sum_t_; }

    // Shannon entropy of the normalized measure, in nats. Requires n >= 1.
    double entropy() const;

    const std::map<BinKey, std::int64_t>& counts() const { return counts_; }

    // Rebuilds the running sums from a raw count table (all counts >= 1).
    static BinnedMeasure from_counts(const std::map<BinKey, std::int64_t>& counts);

private:
    std::map<BinKey, std::int64_t> counts_;
    std::int64_t n_ = 0;
    double sum_plogp_ = 0.0;
    double sum_phi_ = 0.0;
    double sum_t_ = 0.0;
};

// Jensen-Shannon divergence across measures: entropy of the equal-weight
// mixture of the normalized measures minus the mean of their entropies.
double jsd_across(const std::vector<BinnedMeasure>& measures);
double jsd_across(const std::vector<const BinnedMeasure*>& measures);

// Serialization as lines "key<TAB>count"; multi-index keys comma-joined.
void write_measure(std::ostream& out, const BinnedMeasure& measure);
BinnedMeasure read_measure(std::istream& in);

}  // namespace rival
