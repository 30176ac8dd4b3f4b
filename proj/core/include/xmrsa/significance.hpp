#pragma once

#include <cstdint>

#include "xmrsa/mat.hpp"
#include "xmrsa/metrics.hpp"

namespace xmrsa {

// Outcome of a time-shuffle permutation test. The one-sided estimator is
// p = (#{r_perm >= r_obs} + 1) / (n + 1), so p in [1/(n+1), 1] and
// p*(n+1) is always an integer.
struct PermResult {
    double observed = 0.0;
    std::size_t n_perm = 0;
    double null_mean = 0.0;
    double null_sd = 0.0;  // population sd of the null scores
    double p_value = 1.0;
    std::uint64_t seed = 0;
    std::size_t n_ge = 0;      // null scores >= observed (incl. conservative)
    std::size_t n_failed = 0;  // draws counted conservatively after one retry
};

struct PermTestOptions {
    std::size_t batch = 16384;  // work-chunk size; never affects results
    unsigned n_threads = 1;
    MetricOptions metric;
};

// Null scores from n independent uniform row-permutations of y (x is left
// untouched). Draw b uses its own counter-RNG stream keyed by (seed, b),
// so results are bit-identical for any batch size or thread count.
//
// A null draw whose metric evaluation fails is resampled once from a retry
// stream; if it fails again it is counted as >= observed (conservative)
// and excluded from the null moments, with a warning. If the observed
// score itself cannot be computed (e.g. constant y), the result is the
// fully conservative p = 1 with observed = NaN.
PermResult perm_test(const Mat& x, const Mat& y, Metric metric, std::size_t n,
                     std::uint64_t seed, const PermTestOptions& opts = {},
                     Warnings* warnings = nullptr);

}  // namespace xmrsa
