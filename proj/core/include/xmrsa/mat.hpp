#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xmrsa/errors.hpp"

namespace xmrsa {

// Dense real matrix, row-major. Row = time step, column = feature/electrode.
// The universal carrier for EEG epochs, model hidden states and acoustic
// feature tables. Values are finite by construction after load.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows*cols, row-major

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}
    Mat(std::size_t r, std::size_t c, std::vector<double> values)
        : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != rows * cols)
            throw ShapeMismatch("<memory>", rows * cols * sizeof(double),
                                data.size() * sizeof(double));
    }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    std::span<double> row(std::size_t i) {
        return {data.data() + i * cols, cols};
    }

    std::vector<double> col(std::size_t j) const {
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
        return out;
    }

    void set_col(std::size_t j, const std::vector<double>& v) {
        for (std::size_t i = 0; i < rows; ++i) at(i, j) = v[i];
    }

    // Rows of this matrix reordered as out.row(i) = this->row(perm[i]).
    Mat permuted_rows(std::span<const std::size_t> perm) const {
        Mat out(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                out.at(i, j) = at(perm[i], j);
        return out;
    }

    // Rows restricted to `idx`, in order.
    Mat take_rows(std::span<const std::size_t> idx) const {
        Mat out(idx.size(), cols);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j)
                out.at(i, j) = at(idx[i], j);
        return out;
    }

    bool operator==(const Mat& other) const = default;
};

}  // namespace xmrsa
