#include "rival/binned_measure.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rival/estimators.hpp"

namespace rival {

namespace {

double xlogx(std::int64_t n) {
    return n <= 0 ? 0.0 : static_cast<double>(n) * std::log(static_cast<double>(n));
}

// T(c) = (c + 1) phi(c) - c phi(c + 1), with T(0) = 0.
double t_term(std::int64_t c) {
    if (c <= 0)
        return 0.0;
    return (c + 1) * phi_cached(c) - c * phi_cached(c + 1);
}

}  // namespace

InsertEvent BinnedMeasure::insert(const BinKey& key) {
    std::int64_t& slot = counts_[key];
    const std::int64_t prev = slot;
    slot = prev + 1;
    ++n_;
    sum_plogp_ += xlogx(prev + 1) - xlogx(prev);
    sum_phi_ += phi_cached(prev + 1) - phi_cached(prev);
    sum_t_ += t_term(prev + 1) - t_term(prev);
    return InsertEvent{key, prev, n_};
}

double BinnedMeasure::entropy() const {
    if (n_ < 1)
        throw std::domain_error("entropy: measure is empty");
    const double h = std::log(static_cast<double>(n_)) - sum_plogp_ / static_cast<double>(n_);
    return h < 0.0 ? 0.0 : h;
}

BinnedMeasure BinnedMeasure::from_counts(const std::map<BinKey, std::int64_t>& counts) {
    BinnedMeasure m;
    for (const auto& [key, count] : counts) {
        if (count < 1)
            throw std::invalid_argument("from_counts: counts must be positive");
        m.counts_[key] = count;
        m.n_ += count;
        m.sum_plogp_ += xlogx(count);
        m.sum_phi_ += phi_cached(count);
        m.sum_t_ += t_term(count);
    }
    return m;
}

namespace {

double jsd_impl(const std::vector<const BinnedMeasure*>& measures) {
    if (measures.empty())
        throw std::domain_error("jsd_across: empty list");
    const double m = static_cast<double>(measures.size());
    double mean_entropy = 0.0;
    std::map<BinKey, double> mixture;
    for (const BinnedMeasure* measure : measures) {
        if (measure->total() < 1)
            throw std::domain_error("jsd_across: measure is empty");
        mean_entropy += measure->entropy() / m;
        const double n = static_cast<double>(measure->total());
        for (const auto& [key, count] : measure->counts())
            mixture[key] += static_cast<double>(count) / (n * m);
    }
    double mixture_entropy = 0.0;
    for (const auto& [key, p] : mixture)
        if (p > 0.0)
            mixture_entropy -= p * std::log(p);
    const double jsd = mixture_entropy - mean_entropy;
    return jsd < 0.0 ? 0.0 : jsd;
}

}  // namespace

double jsd_across(const std::vector<const BinnedMeasure*>& measures) {
    return jsd_impl(measures);
}

double jsd_across(const std::vector<BinnedMeasure>& measures) {
    std::vector<const BinnedMeasure*> ptrs;
    ptrs.reserve(measures.size());
    for (const BinnedMeasure& m : measures)
        ptrs.push_back(&m);
    return jsd_impl(ptrs);
}

void write_measure(std::ostream& out, const BinnedMeasure& measure) {
    for (const auto& [key, count] : measure.counts()) {
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (i)
                out << ',';
            out << key[i];
        }
        out << '\t' << count << '\n';
    }
}

BinnedMeasure read_measure(std::istream& in) {
    std::map<BinKey, std::int64_t> counts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("read_measure: missing tab separator");
        BinKey key;
        const std::string key_part = line.substr(0, tab);
        if (!key_part.empty()) {
            std::stringstream ss(key_part);
            std::string field;
            while (std::getline(ss, field, ','))
                key.push_back(static_cast<std::int32_t>(std::stol(field)));
        }
        counts[key] += std::stoll(line.substr(tab + 1));
    }
    return BinnedMeasure::from_counts(counts);
}

}  // namespace rival
