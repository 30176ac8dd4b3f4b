#include "xmrsa/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace xmrsa {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> as_eigen(const Mat& m) {
    return {m.data.data(), static_cast<Eigen::Index>(m.rows),
            static_cast<Eigen::Index>(m.cols)};
}

}  // namespace

Mat zscore_columns(const Mat& m) {
    Mat out(m.rows, m.cols);
    const double n = static_cast<double>(m.rows);
    for (std::size_t j = 0; j < m.cols; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) mean += m.at(i, j);
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) {
            const double d = m.at(i, j) - mean;
            var += d * d;
        }
        var /= n;
        if (var == 0.0) throw ZeroVarianceColumn(j);
        const double sd = std::sqrt(var);
        for (std::size_t i = 0; i < m.rows; ++i)
            out.at(i, j) = (m.at(i, j) - mean) / sd;
    }
    return out;
}

std::pair<PcaModel, Mat> pca_fit_transform(const Mat& m, std::size_t k,
                                           Warnings* warnings) {
    if (m.rows < 2) throw TooShort("pca needs at least 2 rows");
    if (k < 1 || k > std::min(m.rows - 1, m.cols))
        throw OutOfRange("pca k=" + std::to_string(k) +
                         " must be in [1, min(rows-1, cols)] for " +
                         std::to_string(m.rows) + "x" + std::to_string(m.cols));

    RowMajorMatrix x = as_eigen(m);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::JacobiSVD<RowMajorMatrix> svd(
        x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double n = static_cast<double>(m.rows);

    // Numerical rank relative to the leading singular value.
    const double tol =
        sv.size() > 0 ? sv(0) * 1e-12 * std::max(m.rows, m.cols) : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;

    const std::size_t k_eff = std::min<std::size_t>(k, rank);
    if (k_eff < k)
        warn(warnings, "pca: rank " + std::to_string(rank) + " < k=" +
                           std::to_string(k) + "; trailing components zero-padded");

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + mean.size());
    model.components = Mat(k, m.cols, 0.0);
    model.explained_variance.assign(k, 0.0);
    Mat scores(m.rows, k, 0.0);

    for (std::size_t c = 0; c < k_eff; ++c) {
        Eigen::VectorXd axis = svd.matrixV().col(static_cast<Eigen::Index>(c));
        // Flip so the largest-magnitude entry is positive.
        Eigen::Index imax;
        axis.cwiseAbs().maxCoeff(&imax);
        if (axis(imax) < 0.0) axis = -axis;
        for (std::size_t j = 0; j < m.cols; ++j)
            model.components.at(c, j) = axis(static_cast<Eigen::Index>(j));
        model.explained_variance[c] = sv(static_cast<Eigen::Index>(c)) *
                                      sv(static_cast<Eigen::Index>(c)) / n;
        const Eigen::VectorXd proj = x * axis;
        for (std::size_t i = 0; i < m.rows; ++i)
            scores.at(i, c) = proj(static_cast<Eigen::Index>(i));
    }
    return {std::move(model), std::move(scores)};
}

Mat resample_to(const Mat& m, std::size_t target_len) {
    if (m.rows < 2 || target_len < 2)
        throw TooShort("resample_to needs rows >= 2 and target_len >= 2");

    Mat out(target_len, m.cols);
    const double scale = static_cast<double>(m.rows - 1) /
                         static_cast<double>(target_len - 1);
    for (std::size_t t = 0; t < target_len; ++t) {
        if (t == 0 || t == target_len - 1) {
            const std::size_t src = (t == 0) ? 0 : m.rows - 1;
            for (std::size_t j = 0; j < m.cols; ++j)
                out.at(t, j) = m.at(src, j);
            continue;
        }
        const double pos = static_cast<double>(t) * scale;
        const std::size_t lo =
            std::min(static_cast<std::size_t>(pos), m.rows - 2);
        const double frac = pos - static_cast<double>(lo);
        for (std::size_t j = 0; j < m.cols; ++j)
            out.at(t, j) =
                m.at(lo, j) + frac * (m.at(lo + 1, j) - m.at(lo, j));
    }
    return out;
}

}  // namespace xmrsa
