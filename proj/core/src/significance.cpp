#include "xmrsa/significance.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "xmrsa/parallel.hpp"
#include "xmrsa/rng.hpp"

namespace xmrsa {

namespace {

// Stream-path tags; shared across language ports of the estimator.
constexpr std::uint64_t kPermStream = 1;
constexpr std::uint64_t kRetryStream = 2;

std::optional<double> null_score(const Mat& x, const Mat& y, Metric metric,
                                 const MetricOptions& mopts,
                                 std::uint64_t seed, std::uint64_t stream,
                                 std::size_t draw) {
    CounterRng rng(seed, {stream, draw});
    const auto perm = rng.permutation(y.rows);
    const Mat y_perm = y.permuted_rows(perm);
    try {
        return eval_metric(metric, x, y_perm, mopts);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

PermResult perm_test(const Mat& x, const Mat& y, Metric metric, std::size_t n,
                     std::uint64_t seed, const PermTestOptions& opts,
                     Warnings* warnings) {
    if (x.rows != y.rows)
        throw ShapeMismatch("<perm_test rows>", x.rows, y.rows);
    if (n < 1) throw OutOfRange("perm_test needs n >= 1");

    PermResult res;
    res.n_perm = n;
    res.seed = seed;

    double observed;
    try {
        observed = eval_metric(metric, x, y, opts.metric, warnings);
    } catch (const Error& e) {
        // Degenerate inputs: every draw counts against the observed score.
        warn(warnings, std::string("perm_test: observed score failed (") +
                           e.what() + "); conservative p = 1");
        res.observed = std::numeric_limits<double>::quiet_NaN();
        res.null_mean = std::numeric_limits<double>::quiet_NaN();
        res.null_sd = std::numeric_limits<double>::quiet_NaN();
        res.n_ge = n;
        res.p_value = 1.0;
        return res;
    }
    res.observed = observed;

    // One slot per draw; chunked scheduling only bounds peak parallelism.
    std::vector<std::optional<double>> scores(n);
    const std::size_t batch = std::max<std::size_t>(opts.batch, 1);
    for (std::size_t chunk = 0; chunk < n; chunk += batch) {
        const std::size_t hi = std::min(chunk + batch, n);
        parallel_for(hi - chunk, opts.n_threads, [&](std::size_t k) {
            const std::size_t b = chunk + k;
            auto s = null_score(x, y, metric, opts.metric, seed, kPermStream, b);
            if (!s)
                s = null_score(x, y, metric, opts.metric, seed, kRetryStream, b);
            scores[b] = s;
        });
    }

    std::size_t n_ge = 0, n_failed = 0, n_ok = 0;
    double sum = 0.0;
    for (const auto& s : scores) {
        if (!s) {
            ++n_failed;
            ++n_ge;  // conservative
            continue;
        }
        ++n_ok;
        sum += *s;
        if (*s >= observed) ++n_ge;
    }
    if (n_failed > 0)
        warn(warnings, "perm_test: " + std::to_string(n_failed) +
                           " null draw(s) failed twice; counted as >= observed");

    if (n_ok > 0) {
        const double mean = sum / static_cast<double>(n_ok);
        double ss = 0.0;
        for (const auto& s : scores)
            if (s) ss += (*s - mean) * (*s - mean);
        res.null_mean = mean;
        res.null_sd = std::sqrt(ss / static_cast<double>(n_ok));
    } else {
        res.null_mean = std::numeric_limits<double>::quiet_NaN();
        res.null_sd = std::numeric_limits<double>::quiet_NaN();
    }
    res.n_ge = n_ge;
    res.n_failed = n_failed;
    res.p_value = static_cast<double>(n_ge + 1) / static_cast<double>(n + 1);
    return res;
}

}  // namespace xmrsa
