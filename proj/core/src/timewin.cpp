#include "xmrsa/timewin.hpp"

#include "xmrsa/metrics.hpp"
#include "xmrsa/rdm.hpp"

namespace xmrsa {

TokenWindow token_window(std::size_t t_a, double d_s_ms, double a_ms,
                         double b_ms) {
    if (!(a_ms >= 0.0 && a_ms < b_ms))
        throw BadBounds("need 0 <= a < b, got [" + std::to_string(a_ms) +
                        ", " + std::to_string(b_ms) + ")");
    if (t_a < 2) throw BadBounds("need at least 2 tokens");
    if (!(d_s_ms > 0.0)) throw BadBounds("duration must be positive");

    TokenWindow w;
    w.a_ms = a_ms;
    w.b_ms = b_ms;
    const double hi = std::min(b_ms, d_s_ms);
    for (std::size_t t = 0; t < t_a; ++t) {
        const double tau =
            static_cast<double>(t) * d_s_ms / static_cast<double>(t_a);
        if (tau >= a_ms && tau < hi) w.indices.push_back(t);
    }
    return w;
}

std::vector<WindowRsaRow> windowed_rsa(
    const Mat& eeg, const Mat& llm, double d_s_ms,
    const std::vector<std::pair<double, double>>& windows_ms,
    Warnings* warnings) {
    if (eeg.rows != llm.rows)
        throw ShapeMismatch("<windowed_rsa rows>", eeg.rows, llm.rows);

    std::vector<WindowRsaRow> rows;
    rows.reserve(windows_ms.size());
    for (const auto& [a, b] : windows_ms) {
        const TokenWindow w = token_window(eeg.rows, d_s_ms, a, b);
        WindowRsaRow row;
        row.a_ms = a;
        row.b_ms = b;
        row.n_tokens = w.indices.size();
        if (w.indices.size() < 3) {
            row.note = "degenerate: fewer than 3 token samples";
            rows.push_back(std::move(row));
            continue;
        }
        try {
            const Mat e = eeg.take_rows(w.indices);
            const Mat l = llm.take_rows(w.indices);
            const RdmVec ev = vec_upper(build_rdm(e, warnings));
            const RdmVec lv = vec_upper(build_rdm(l, warnings));
            row.rsa = spearman_rsa(ev, lv).value;
        } catch (const Error& e) {
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace xmrsa
