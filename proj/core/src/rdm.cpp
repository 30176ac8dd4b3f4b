#include "xmrsa/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xmrsa {

Rdm build_rdm(const Mat& m, Warnings* warnings) {
    if (m.rows < 3) throw TooShort("build_rdm needs at least 3 time steps");
    if (m.cols < 2)
        throw TooShort("build_rdm needs at least 2 feature dimensions");

    const std::size_t n = m.rows;
    const double d = static_cast<double>(m.cols);

    // Per-row mean and centered norm; constant rows flagged.
    std::vector<double> mean(n), norm(n);
    std::vector<bool> constant(n, false);
    std::size_t n_constant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        const double mu = std::accumulate(row.begin(), row.end(), 0.0) / d;
        double ss = 0.0;
        for (double v : row) ss += (v - mu) * (v - mu);
        mean[i] = mu;
        norm[i] = std::sqrt(ss);
        if (ss == 0.0) {
            constant[i] = true;
            ++n_constant;
        }
    }
    if (n_constant > 0)
        warn(warnings, "build_rdm: " + std::to_string(n_constant) +
                           " constant row(s); their distances set to 1");

    Rdm r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist;
            if (constant[i] || constant[j]) {
                dist = 1.0;  // corr defined as 0 for a flat time step
            } else {
                double dot = 0.0;
                const auto ri = m.row(i), rj = m.row(j);
                for (std::size_t c = 0; c < m.cols; ++c)
                    dot += (ri[c] - mean[i]) * (rj[c] - mean[j]);
                const double corr = dot / (norm[i] * norm[j]);
                dist = std::clamp(1.0 - corr, 0.0, 2.0);
            }
            r.at(i, j) = dist;
            r.at(j, i) = dist;
        }
    }
    return r;
}

RdmVec vec_upper(const Rdm& r) {
    RdmVec v;
    v.n = r.n;
    v.values.reserve(r.n * (r.n - 1) / 2);
    for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = i + 1; j < r.n; ++j)
            v.values.push_back(r.at(i, j));
    return v;
}

Rdm rdm_from_vec(const RdmVec& v) {
    if (v.values.size() != v.n * (v.n - 1) / 2)
        throw ShapeMismatch("<rdmvec>", v.n * (v.n - 1) / 2, v.values.size());
    Rdm r(v.n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < v.n; ++i)
        for (std::size_t j = i + 1; j < v.n; ++j, ++k) {
            r.at(i, j) = v.values[k];
            r.at(j, i) = v.values[k];
        }
    return r;
}

std::vector<double> rank_transform(const std::vector<double>& v) {
    const std::size_t m = v.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && v[order[j + 1]] == v[order[i]]) ++j;
        // positions i..j (0-based) share the midrank of 1-based positions
        const double midrank = static_cast<double>(i + j) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace xmrsa
