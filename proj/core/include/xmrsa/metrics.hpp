#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"
#include "xmrsa/rdm.hpp"

namespace xmrsa {

enum class Metric {
    PearsonRSA,
    SpearmanRSA,
    KendallTauB,
    DCor,
    RV,
    MIGauss,
    CKALinear,
    CKARBF,
};

inline constexpr std::array<Metric, 8> kAllMetrics = {
    Metric::PearsonRSA, Metric::SpearmanRSA, Metric::KendallTauB,
    Metric::DCor,       Metric::RV,          Metric::MIGauss,
    Metric::CKALinear,  Metric::CKARBF,
};

std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);

struct Score {
    Metric metric;
    double value;
};

struct MetricOptions {
    // RBF kernel bandwidth; when unset, the median of pairwise Euclidean
    // distances of each argument is used.
    std::optional<double> rbf_sigma;
};

// Pearson correlation of two equal-length vectors. Throws ZeroVariance
// when either is constant.
double pearson(std::span<const double> a, std::span<const double> b);

// ---- RSA family: operates on vectorized RDMs ----

Score pearson_rsa(const RdmVec& a, const RdmVec& b);

// Pearson on midranks; equal to pearson_rsa(rank(a), rank(b)) exactly.
Score spearman_rsa(const RdmVec& a, const RdmVec& b);

// Tie-corrected rank association (C-D)/sqrt((C+D+Ta)(C+D+Tb)), with Ta/Tb
// counting pairs tied only in a / only in b. Merge-sort inversion counting,
// O(n log n). Throws AllTies when a denominator factor is zero.
Score kendall_tau_b(std::span<const double> a, std::span<const double> b);

// ---- dependence family: operates on row-aligned matrices ----

// Distance correlation from doubly-centered Euclidean distance matrices.
// Degenerate inputs (zero distance variance) yield 0 with a warning.
Score dcor(const Mat& x, const Mat& y, Warnings* warnings = nullptr);

// tr((X'Y)(Y'X)) / sqrt(tr((X'X)^2) tr((Y'Y)^2)) on column-centered X, Y.
Score rv_coefficient(const Mat& x, const Mat& y);

// Gaussian mutual-information proxy -0.5*ln(1 - r^2) of the flattened
// cross-modal Pearson correlation; r^2 clamped to 1 - 1e-12.
Score mi_gauss(const Mat& x, const Mat& y);

enum class CkaKernel { Linear, Rbf };

// Centered-kernel alignment tr(KcLc)/sqrt(tr(KcKc) tr(LcLc)). The RBF
// bandwidth defaults to the per-argument median pairwise distance.
Score cka(const Mat& x, const Mat& y, CkaKernel kernel,
          const MetricOptions& opts = {});

// Evaluates any metric on two row-aligned matrices. The RSA family goes
// through correlation-distance RDM vectorization; dCor/RV/MI/CKA consume
// the matrices directly.
double eval_metric(Metric metric, const Mat& x, const Mat& y,
                   const MetricOptions& opts = {}, Warnings* warnings = nullptr);

}  // namespace xmrsa
