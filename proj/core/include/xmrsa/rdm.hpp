#pragma once

#include <vector>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"

namespace xmrsa {

// Symmetric dissimilarity matrix over time steps: entry (i,j) is the
// correlation distance 1 - Pearson(row_i, row_j). Diagonal exactly 0,
// entries in [0,2].
struct Rdm {
    std::size_t n = 0;
    std::vector<double> values;  // n*n, row-major, symmetric

    Rdm() = default;
    explicit Rdm(std::size_t n_) : n(n_), values(n_ * n_, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Strictly-upper-triangular vectorization, row-major (i<j), length n(n-1)/2.
struct RdmVec {
    std::size_t n = 0;  // source RDM side
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

// Correlation-distance RDM over time steps. Requires rows >= 3 and
// cols >= 2 (Pearson across feature dimensions needs two points).
// A constant row makes Pearson undefined; its distances are set to 1
// (zero correlation) and a warning is recorded.
Rdm build_rdm(const Mat& m, Warnings* warnings = nullptr);

RdmVec vec_upper(const Rdm& r);

// Inverse of vec_upper: symmetric matrix with zero diagonal.
Rdm rdm_from_vec(const RdmVec& v);

// Average (midrank) ranks in [1, m]; ties share the mean of their
// positions, so the rank sum is always m(m+1)/2.
std::vector<double> rank_transform(const std::vector<double>& v);

}  // namespace xmrsa
