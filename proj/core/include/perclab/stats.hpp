#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace perclab {

// Streaming mean / standard error accumulator (Welford).
struct MeanVar {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double stderr_mean() const {
        return n > 1 ? std::sqrt(variance() / double(n)) : 0.0;
    }
    // Merge two accumulators (parallel reduction).
    void merge(const MeanVar& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const std::size_t nt = n + o.n;
        m2 += o.m2 + d * d * double(n) * double(o.n) / double(nt);
        mean += d * double(o.n) / double(nt);
        n = nt;
    }
};

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

inline double binomial_stderr(double phat, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(phat * (1.0 - phat), 0.0) / double(n));
}

// Binomial(n, p) pmf over k = 0..n, computed by the log-space recurrence
// pmf(k+1)/pmf(k) = (n-k)/(k+1) * p/(1-p), normalized through the max to
// stay finite for n in the 10^5 range.
inline std::vector<double> binomial_pmf(std::size_t n, double p) {
    std::vector<double> logw(n + 1);
    if (p <= 0.0 || p >= 1.0) {
        std::vector<double> w(n + 1, 0.0);
        w[p <= 0.0 ? 0 : n] = 1.0;
        return w;
    }
    const double lr = std::log(p) - std::log1p(-p);
    logw[0] = double(n) * std::log1p(-p);
    for (std::size_t k = 0; k + 1 <= n; ++k) {
        logw[k + 1] = logw[k] + std::log(double(n - k) / double(k + 1)) + lr;
    }
    const double m = *std::max_element(logw.begin(), logw.end());
    std::vector<double> w(n + 1);
    double sum = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        w[k] = std::exp(logw[k] - m);
        sum += w[k];
    }
    for (auto& x : w) x /= sum;
    return w;
}

// Upper tails T[k] = P(X >= k) for X ~ Binomial(n, p), k = 0..n+1.
inline std::vector<double> binomial_upper_tail(std::size_t n, double p) {
    const auto pmf = binomial_pmf(n, p);
    std::vector<double> tail(n + 2, 0.0);
    for (std::size_t k = n + 1; k-- > 0;) {
        tail[k] = tail[k + 1] + pmf[k];
    }
    tail[0] = 1.0;
    return tail;
}

// Batch-means standard error of the mean of a (possibly autocorrelated)
// sequence. Uses ~sqrt(n) batches, capped.
inline double batch_means_stderr(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 4) {
        MeanVar mv;
        for (double x : xs) mv.add(x);
        return mv.stderr_mean();
    }
    std::size_t nb = std::min<std::size_t>(
        32, std::max<std::size_t>(4, std::size_t(std::sqrt(double(n)))));
    const std::size_t bs = n / nb;
    nb = n / bs;
    MeanVar batches;
    for (std::size_t b = 0; b < nb; ++b) {
        double s = 0.0;
        for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += xs[i];
        batches.add(s / double(bs));
    }
    return batches.stderr_mean();
}

}  // namespace perclab
