#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"

namespace xmrsa {

// Token indices of a real-time window [a, b) ms. Token t (0-based) carries
// the timestamp t * D_s / T_a on a grid treated as uniform over [0, D_s);
// the window is truncated to [a, min(b, D_s)).
struct TokenWindow {
    double a_ms = 0.0;
    double b_ms = 0.0;
    std::vector<std::size_t> indices;  // strictly increasing

    // Fewer than two samples: omitted from RSA per the selection rule.
    bool degenerate() const { return indices.size() < 2; }
};

TokenWindow token_window(std::size_t t_a, double d_s_ms, double a_ms,
                         double b_ms);

inline std::vector<std::pair<double, double>> default_windows_ms() {
    return {{0.0, 250.0}, {250.0, 500.0}, {500.0, 750.0}, {750.0, 1000.0}};
}

struct WindowRsaRow {
    double a_ms = 0.0;
    double b_ms = 0.0;
    std::size_t n_tokens = 0;
    std::optional<double> rsa;  // empty for degenerate windows
    std::string note;           // reason when empty
};

// Restricts both matrices to each window's token indices, rebuilds the
// correlation-distance RDMs and computes Spearman RSA. Windows with fewer
// than three tokens (RdmVec shorter than 3) are reported as null rows,
// slightly stricter than the two-sample selection rule.
std::vector<WindowRsaRow> windowed_rsa(
    const Mat& eeg, const Mat& llm, double d_s_ms,
    const std::vector<std::pair<double, double>>& windows_ms,
    Warnings* warnings = nullptr);

}  // namespace xmrsa
