#include "rival/special_functions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace rival {

double digamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("digamma: argument must be positive");
    // Recurse upward to x >= 10, then use the asymptotic expansion.
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number series; truncation error < 1e-15 for x >= 10.
    double series = inv2 * (1.0 / 12.0
                  - inv2 * (1.0 / 120.0
                  - inv2 * (1.0 / 252.0
                  - inv2 * (1.0 / 240.0
                  - inv2 * (1.0 / 132.0
                  - inv2 * (691.0 / 32760.0
                  - inv2 * (1.0 / 12.0)))))));
    return result + std::log(x) - 0.5 * inv - series;
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");
    return std::lgamma(x);
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * std::numeric_limits<double>::epsilon())
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps)
            break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0))
        throw std::domain_error("regularized_gamma_p: shape must be positive");
    if (x < 0.0)
        throw std::domain_error("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0)
        return 0.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_cdf(int degrees_of_freedom, double x) {
    if (degrees_of_freedom < 1)
        throw std::domain_error("chi_square_cdf: need at least one degree of freedom");
    if (x < 0.0)
        throw std::domain_error("chi_square_cdf: x must be nonnegative");
    return regularized_gamma_p(0.5 * degrees_of_freedom, 0.5 * x);
}

double chi_square_quantile(int degrees_of_freedom, double probability) {
    if (degrees_of_freedom < 1)
        throw std::domain_error("chi_square_quantile: need at least one degree of freedom");
    if (probability < 0.0 || probability >= 1.0)
        throw std::domain_error("chi_square_quantile: probability must lie in [0, 1)");
    if (probability == 0.0)
        return 0.0;
    // Bracket the quantile, then bisect. Quantiles are cached per (K, delta)
    // by the caller, so robustness matters more than speed here.
    double lo = 0.0;
    double hi = static_cast<double>(degrees_of_freedom);
    while (chi_square_cdf(degrees_of_freedom, hi) < probability)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double p = chi_square_cdf(degrees_of_freedom, mid);
        if (std::fabs(p - probability) <= 1e-12)
            return mid;
        if (p < probability)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double chi_square_quantile_cached(int degrees_of_freedom, double probability) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, double> cache;
    const auto key = std::make_pair(degrees_of_freedom, probability);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    const double value = chi_square_quantile(degrees_of_freedom, probability);
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, value);
    return value;
}

}  // namespace rival
