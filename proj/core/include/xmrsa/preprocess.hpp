#pragma once

#include <vector>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"

namespace xmrsa {

// Principal axes of a centered data matrix. Component rows are orthonormal
// and ordered by non-increasing explained variance (population convention,
// eigenvalues of the divide-by-N covariance).
struct PcaModel {
    std::vector<double> mean;          // length cols
    Mat components;                    // k x cols, orthonormal rows
    std::vector<double> explained_variance;  // k, non-increasing
};

// Columns standardized to mean 0 and population (divide-by-N) standard
// deviation 1. A constant column raises ZeroVarianceColumn with its index.
Mat zscore_columns(const Mat& m);

// PCA by SVD of the centered matrix. Scores are rows x k with mutually
// orthogonal columns. Sign convention: the largest-magnitude entry of each
// component row is positive, so results are platform-stable.
// Requires k <= min(rows-1, cols). If k exceeds the numerical rank the
// trailing components/scores are zero-padded and a warning is recorded.
std::pair<PcaModel, Mat> pca_fit_transform(const Mat& m, std::size_t k,
                                           Warnings* warnings = nullptr);

// Piecewise-linear interpolation of each column onto target_len equally
// spaced positions over the source index range [0, rows-1]; endpoints are
// preserved exactly. Requires rows >= 2 and target_len >= 2.
Mat resample_to(const Mat& m, std::size_t target_len);

}  // namespace xmrsa
