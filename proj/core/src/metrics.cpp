#include "xmrsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace xmrsa {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> as_eigen(const Mat& m) {
    return {m.data.data(), static_cast<Eigen::Index>(m.rows),
            static_cast<Eigen::Index>(m.cols)};
}

// Pairwise Euclidean distance matrix over rows.
RowMajorMatrix row_distances(const Mat& m) {
    const std::size_t n = m.rows;
    RowMajorMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        const auto ri = m.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto rj = m.row(j);
            double ss = 0.0;
            for (std::size_t c = 0; c < m.cols; ++c) {
                const double diff = ri[c] - rj[c];
                ss += diff * diff;
            }
            const double dist = std::sqrt(ss);
            d(i, j) = dist;
            d(j, i) = dist;
        }
    }
    return d;
}

// A - row means - col means + grand mean, in place.
void double_center(RowMajorMatrix& a) {
    const Eigen::VectorXd rm = a.rowwise().mean();
    const Eigen::RowVectorXd cm = a.colwise().mean();
    const double gm = a.mean();
    a.colwise() -= rm;
    a.rowwise() -= cm;
    a.array() += gm;
}

// Median of the strictly-upper pairwise Euclidean distances.
double median_pairwise_distance(const Mat& m) {
    std::vector<double> d;
    d.reserve(m.rows * (m.rows - 1) / 2);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = i + 1; j < m.rows; ++j) {
            double ss = 0.0;
            for (std::size_t c = 0; c < m.cols; ++c) {
                const double diff = m.at(i, c) - m.at(j, c);
                ss += diff * diff;
            }
            d.push_back(std::sqrt(ss));
        }
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + mid, d.end());
    double med = d[mid];
    if (d.size() % 2 == 0) {
        const double lo = *std::max_element(d.begin(), d.begin() + mid);
        med = 0.5 * (lo + med);
    }
    return med;
}

RowMajorMatrix gram(const Mat& m, CkaKernel kernel,
                    const MetricOptions& opts) {
    if (kernel == CkaKernel::Linear) {
        const auto x = as_eigen(m);
        return x * x.transpose();
    }
    double sigma = opts.rbf_sigma.value_or(median_pairwise_distance(m));
    if (!(sigma > 0.0)) throw DegenerateGram();
    RowMajorMatrix d = row_distances(m);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    return (-d.array().square() * inv).exp();
}

// Pairs within runs of equal keys: sum of t*(t-1)/2.
template <typename Iter, typename Eq>
std::uint64_t tied_pairs(Iter begin, Iter end, Eq eq) {
    std::uint64_t total = 0;
    auto it = begin;
    while (it != end) {
        auto run = it;
        std::uint64_t t = 0;
        while (run != end && eq(*it, *run)) {
            ++run;
            ++t;
        }
        total += t * (t - 1) / 2;
        it = run;
    }
    return total;
}

// Merge sort counting strict inversions (v[i] > v[j] for i < j).
std::uint64_t count_inversions(std::vector<double>& v,
                               std::vector<double>& scratch, std::size_t lo,
                               std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(v, scratch, lo, mid) +
                        count_inversions(v, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inv += mid - i;
            scratch[k++] = v[j++];
        } else {
            scratch[k++] = v[i++];
        }
    }
    while (i < mid) scratch[k++] = v[i++];
    while (j < hi) scratch[k++] = v[j++];
    std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
    return inv;
}

}  // namespace

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::PearsonRSA: return "pearson_rsa";
        case Metric::SpearmanRSA: return "spearman_rsa";
        case Metric::KendallTauB: return "kendall_tau_b";
        case Metric::DCor: return "dcor";
        case Metric::RV: return "rv";
        case Metric::MIGauss: return "mi_gauss";
        case Metric::CKALinear: return "cka_linear";
        case Metric::CKARBF: return "cka_rbf";
    }
    return "unknown";
}

std::optional<Metric> metric_from_name(std::string_view name) {
    for (Metric m : kAllMetrics)
        if (metric_name(m) == name) return m;
    return std::nullopt;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ShapeMismatch("<pearson>", a.size(), b.size());
    if (a.size() < 2) throw TooShort("pearson needs at least 2 values");

    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw ZeroVariance("constant vector in pearson");
    return sab / std::sqrt(saa * sbb);
}

Score pearson_rsa(const RdmVec& a, const RdmVec& b) {
    return {Metric::PearsonRSA, pearson(a.values, b.values)};
}

Score spearman_rsa(const RdmVec& a, const RdmVec& b) {
    const auto ra = rank_transform(a.values);
    const auto rb = rank_transform(b.values);
    return {Metric::SpearmanRSA, pearson(ra, rb)};
}

Score kendall_tau_b(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ShapeMismatch("<kendall>", a.size(), b.size());
    const std::size_t n = a.size();
    if (n < 2) throw TooShort("kendall_tau_b needs at least 2 values");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (a[i] != a[j]) return a[i] < a[j];
        return b[i] < b[j];
    });

    // Pairs tied in a, and tied in both, over runs of the (a, b) sort.
    std::uint64_t m1 = tied_pairs(
        order.begin(), order.end(),
        [&](std::size_t i, std::size_t j) { return a[i] == a[j]; });
    std::uint64_t m_ab = tied_pairs(
        order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return a[i] == a[j] && b[i] == b[j];
        });

    // Discordant pairs = strict inversions of b once sorted by (a, b):
    // within equal a the b's are ascending and contribute none.
    std::vector<double> bs(n);
    for (std::size_t i = 0; i < n; ++i) bs[i] = b[order[i]];
    std::vector<double> scratch(n);
    const std::uint64_t discordant = count_inversions(bs, scratch, 0, n);

    std::uint64_t m2 = tied_pairs(bs.begin(), bs.end(),
                                  [](double x, double y) { return x == y; });

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (n0 == m1 || n0 == m2) throw AllTies();

    const std::uint64_t nondegenerate = n0 - m1 - m2 + m_ab;  // C + D
    const double c_minus_d =
        static_cast<double>(nondegenerate) - 2.0 * static_cast<double>(discordant);
    // Equal factors skip the sqrt: their product can exceed 2^53 and the
    // rounded root would break tau(v, v) == 1.
    const double d1 = static_cast<double>(n0 - m1);
    const double d2 = static_cast<double>(n0 - m2);
    const double denom = (n0 - m1 == n0 - m2) ? d1 : std::sqrt(d1 * d2);
    return {Metric::KendallTauB, c_minus_d / denom};
}

Score dcor(const Mat& x, const Mat& y, Warnings* warnings) {
    if (x.rows != y.rows) throw ShapeMismatch("<dcor rows>", x.rows, y.rows);
    if (x.rows < 3) throw TooShort("dcor needs at least 3 rows");

    RowMajorMatrix a = row_distances(x);
    RowMajorMatrix b = row_distances(y);
    double_center(a);
    double_center(b);

    const double n2 = static_cast<double>(x.rows) * static_cast<double>(x.rows);
    const double dcov2 = (a.array() * b.array()).sum() / n2;
    const double dvar2x = a.array().square().sum() / n2;
    const double dvar2y = b.array().square().sum() / n2;
    if (dvar2x <= 0.0 || dvar2y <= 0.0) {
        warn(warnings, "dcor: degenerate distance variance, returning 0");
        return {Metric::DCor, 0.0};
    }
    const double r2 = dcov2 / std::sqrt(dvar2x * dvar2y);
    return {Metric::DCor, std::sqrt(std::max(r2, 0.0))};
}

Score rv_coefficient(const Mat& x, const Mat& y) {
    if (x.rows != y.rows) throw ShapeMismatch("<rv rows>", x.rows, y.rows);
    if (x.rows < 2) throw TooShort("rv needs at least 2 rows");

    RowMajorMatrix xc = as_eigen(x);
    RowMajorMatrix yc = as_eigen(y);
    xc.rowwise() -= xc.colwise().mean().eval();
    yc.rowwise() -= yc.colwise().mean().eval();
    if (xc.squaredNorm() == 0.0 || yc.squaredNorm() == 0.0)
        throw ZeroVariance("centered matrix is zero in rv_coefficient");

    // tr((X'Y)(Y'X)) = ||X'Y||_F^2, and likewise for the variance terms.
    const double num = (xc.transpose() * yc).squaredNorm();
    const double den = std::sqrt((xc.transpose() * xc).squaredNorm() *
                                 (yc.transpose() * yc).squaredNorm());
    return {Metric::RV, num / den};
}

Score mi_gauss(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols)
        throw ShapeMismatch("<mi shapes>", x.rows * x.cols, y.rows * y.cols);
    const double r = pearson(x.data, y.data);
    const double r2 = std::min(r * r, 1.0 - 1e-12);
    return {Metric::MIGauss, -0.5 * std::log(1.0 - r2)};
}

Score cka(const Mat& x, const Mat& y, CkaKernel kernel,
          const MetricOptions& opts) {
    if (x.rows != y.rows) throw ShapeMismatch("<cka rows>", x.rows, y.rows);
    if (x.rows < 3) throw TooShort("cka needs at least 3 rows");

    RowMajorMatrix k = gram(x, kernel, opts);
    RowMajorMatrix l = gram(y, kernel, opts);
    double_center(k);
    double_center(l);

    const double kk = k.array().square().sum();
    const double ll = l.array().square().sum();
    if (kk == 0.0 || ll == 0.0) throw DegenerateGram();
    const double kl = (k.array() * l.array()).sum();
    const Metric id =
        kernel == CkaKernel::Linear ? Metric::CKALinear : Metric::CKARBF;
    return {id, kl / std::sqrt(kk * ll)};
}

double eval_metric(Metric metric, const Mat& x, const Mat& y,
                   const MetricOptions& opts, Warnings* warnings) {
    switch (metric) {
        case Metric::PearsonRSA:
        case Metric::SpearmanRSA:
        case Metric::KendallTauB: {
            const RdmVec rx = vec_upper(build_rdm(x, warnings));
            const RdmVec ry = vec_upper(build_rdm(y, warnings));
            if (metric == Metric::PearsonRSA) return pearson_rsa(rx, ry).value;
            if (metric == Metric::SpearmanRSA) return spearman_rsa(rx, ry).value;
            return kendall_tau_b(rx.values, ry.values).value;
        }
        case Metric::DCor: return dcor(x, y, warnings).value;
        case Metric::RV: return rv_coefficient(x, y).value;
        case Metric::MIGauss: return mi_gauss(x, y).value;
        case Metric::CKALinear: return cka(x, y, CkaKernel::Linear, opts).value;
        case Metric::CKARBF: return cka(x, y, CkaKernel::Rbf, opts).value;
    }
    throw OutOfRange("unknown metric");
}

}  // namespace xmrsa
