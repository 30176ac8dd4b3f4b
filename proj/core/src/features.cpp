#include "xmrsa/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "xmrsa/metrics.hpp"
#include "xmrsa/rdm.hpp"

namespace xmrsa {

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Centered index window [t - floor((w-1)/2), t + ceil((w-1)/2)],
// truncated to [0, n).
std::pair<std::size_t, std::size_t> window_bounds(std::size_t t, std::size_t w,
                                                  std::size_t n) {
    const std::size_t back = (w - 1) / 2;
    const std::size_t fwd = w / 2;  // ceil((w-1)/2)
    const std::size_t lo = t >= back ? t - back : 0;
    const std::size_t hi = std::min(t + fwd + 1, n);
    return {lo, hi};
}

}  // namespace

BandSpec BandSpec::log_spaced_default() {
    // edges 2^-5 .. 2^0; DC excluded since the lowest edge is positive
    BandSpec s;
    const double edges[] = {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
    for (int i = 0; i < 5; ++i) s.bands.emplace_back(edges[i], edges[i + 1]);
    return s;
}

void BandSpec::validate() const {
    if (bands.empty()) throw BadWindow("band spec has no bands");
    for (const auto& [lo, hi] : bands)
        if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
            throw BadWindow("band bounds must satisfy 0 <= low < high <= 1");
}

void FeatureConfig::validate() const {
    // either window family may be empty, dropping that feature block
    for (std::size_t w : stats_windows)
        if (w < 3 || w % 2 == 0)
            throw BadWindow("stats window must be odd and >= 3, got " +
                            std::to_string(w));
    for (std::size_t w : fft_windows)
        if (w < 4 || !is_power_of_two(w))
            throw BadWindow("fft window must be a power of two >= 4, got " +
                            std::to_string(w));
    if (!fft_windows.empty()) bands.validate();
}

std::pair<std::vector<double>, std::vector<double>> diffs(
    const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 3) throw TooShort("diffs needs at least 3 samples");

    std::vector<double> d1(n, 0.0), d2(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) d1[t] = series[t] - series[t - 1];
    for (std::size_t t = 2; t < n; ++t) d2[t] = d1[t] - d1[t - 1];
    return {std::move(d1), std::move(d2)};
}

Mat windowed_stats(const std::vector<double>& series, std::size_t w) {
    if (w < 3 || w % 2 == 0)
        throw BadWindow("stats window must be odd and >= 3");
    const std::size_t n = series.size();
    if (n == 0) throw TooShort("empty series");

    Mat out(n, 3);
    for (std::size_t t = 0; t < n; ++t) {
        const auto [lo, hi] = window_bounds(t, w, n);
        const double count = static_cast<double>(hi - lo);
        double sum = 0.0, maxv = -std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i < hi; ++i) {
            sum += series[i];
            maxv = std::max(maxv, series[i]);
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            ss += (series[i] - mean) * (series[i] - mean);
        out.at(t, 0) = mean;
        out.at(t, 1) = std::sqrt(ss / count);
        out.at(t, 2) = maxv;
    }
    return out;
}

std::vector<double> windowed_rms(const std::vector<double>& series,
                                 std::size_t w) {
    if (w < 3 || w % 2 == 0)
        throw BadWindow("rms window must be odd and >= 3");
    const std::size_t n = series.size();
    if (n == 0) throw TooShort("empty series");

    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto [lo, hi] = window_bounds(t, w, n);
        double ss = 0.0;
        for (std::size_t i = lo; i < hi; ++i) ss += series[i] * series[i];
        out[t] = std::sqrt(ss / static_cast<double>(hi - lo));
    }
    return out;
}

Mat band_powers(const std::vector<double>& series, std::size_t w_fft,
                const BandSpec& spec, bool hann_taper) {
    if (w_fft < 4 || !is_power_of_two(w_fft))
        throw BadWindow("fft window must be a power of two >= 4");
    spec.validate();
    const std::size_t n = series.size();
    if (n == 0) throw TooShort("empty series");

    // One-sided bins per band: k in [0, w/2] with 2k/w in [low, high);
    // high == 1 also claims the Nyquist bin.
    std::vector<std::vector<std::size_t>> band_bins(spec.bands.size());
    for (std::size_t b = 0; b < spec.bands.size(); ++b) {
        const auto [lo, hi] = spec.bands[b];
        for (std::size_t k = 0; k <= w_fft / 2; ++k) {
            const double frac =
                2.0 * static_cast<double>(k) / static_cast<double>(w_fft);
            if ((frac >= lo && frac < hi) || (hi == 1.0 && frac == 1.0))
                band_bins[b].push_back(k);
        }
    }

    std::vector<double> taper(w_fft, 1.0);
    if (hann_taper)
        for (std::size_t i = 0; i < w_fft; ++i)
            taper[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                             static_cast<double>(i) /
                                             static_cast<double>(w_fft - 1)));

    Mat out(n, spec.bands.size());
    std::vector<std::complex<double>> seg(w_fft);
    const std::ptrdiff_t back = static_cast<std::ptrdiff_t>((w_fft - 1) / 2);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < w_fft; ++i) {
            const std::ptrdiff_t src =
                static_cast<std::ptrdiff_t>(t) - back + static_cast<std::ptrdiff_t>(i);
            const double v =
                (src >= 0 && src < static_cast<std::ptrdiff_t>(n))
                    ? series[static_cast<std::size_t>(src)]
                    : 0.0;  // zero fill outside the epoch
            seg[i] = v * taper[i];
        }
        fft_radix2(seg);
        for (std::size_t b = 0; b < spec.bands.size(); ++b) {
            double p = 0.0;
            for (std::size_t k : band_bins[b]) p += std::norm(seg[k]);
            out.at(t, b) = p;
        }
    }
    return out;
}

EnrichedSeq enrich_electrode(const std::vector<double>& series,
                             const FeatureConfig& cfg, std::string electrode) {
    cfg.validate();
    const std::size_t n = series.size();
    std::size_t max_window = 3;
    for (std::size_t w : cfg.stats_windows) max_window = std::max(max_window, w);
    for (std::size_t w : cfg.fft_windows) max_window = std::max(max_window, w);
    if (n < max_window)
        throw TooShort("series length " + std::to_string(n) +
                       " < max window " + std::to_string(max_window));

    EnrichedSeq seq;
    seq.electrode = std::move(electrode);
    seq.values = Mat(n, cfg.feature_dim());

    std::size_t col = 0;
    auto put_col = [&](const std::vector<double>& v) {
        for (std::size_t t = 0; t < n; ++t) seq.values.at(t, col) = v[t];
        ++col;
    };

    put_col(series);
    const auto [d1, d2] = diffs(series);
    put_col(d1);
    put_col(d2);
    for (std::size_t w : cfg.stats_windows) {
        const Mat st = windowed_stats(series, w);
        for (std::size_t c = 0; c < 3; ++c, ++col)
            for (std::size_t t = 0; t < n; ++t)
                seq.values.at(t, col) = st.at(t, c);
    }
    for (std::size_t w : cfg.stats_windows) put_col(windowed_rms(series, w));
    for (std::size_t w : cfg.fft_windows) {
        const Mat bp = band_powers(series, w, cfg.bands, cfg.hann_taper);
        for (std::size_t b = 0; b < bp.cols; ++b, ++col)
            for (std::size_t t = 0; t < n; ++t)
                seq.values.at(t, col) = bp.at(t, b);
    }
    return seq;
}

std::vector<std::optional<double>> electrode_similarity(
    const Mat& eeg_aligned, const Mat& llm, const FeatureConfig& cfg,
    Warnings* warnings) {
    if (eeg_aligned.rows != llm.rows)
        throw ShapeMismatch("<electrode_similarity rows>", eeg_aligned.rows,
                            llm.rows);

    const RdmVec llm_vec = vec_upper(build_rdm(llm, warnings));
    std::vector<std::optional<double>> out(eeg_aligned.cols);
    for (std::size_t c = 0; c < eeg_aligned.cols; ++c) {
        try {
            const EnrichedSeq seq = enrich_electrode(eeg_aligned.col(c), cfg);
            const RdmVec e_vec = vec_upper(build_rdm(seq.values, warnings));
            out[c] = spearman_rsa(e_vec, llm_vec).value;
        } catch (const Error& e) {
            warn(warnings, "electrode " + std::to_string(c) +
                               " similarity failed: " + e.what());
            out[c] = std::nullopt;
        }
    }
    return out;
}

Mat layer_electrode_grid(const Mat& eeg_aligned, const std::vector<Mat>& layers,
                         const FeatureConfig& cfg, Warnings* warnings) {
    if (layers.empty()) throw TooShort("no layers given");

    // Enriched RDM per electrode is layer-independent; build once.
    std::vector<std::optional<RdmVec>> evecs(eeg_aligned.cols);
    for (std::size_t c = 0; c < eeg_aligned.cols; ++c) {
        try {
            const EnrichedSeq seq = enrich_electrode(eeg_aligned.col(c), cfg);
            evecs[c] = vec_upper(build_rdm(seq.values, warnings));
        } catch (const Error& e) {
            warn(warnings, "electrode " + std::to_string(c) +
                               " enrichment failed: " + e.what());
        }
    }

    Mat grid(eeg_aligned.cols, layers.size(),
             std::numeric_limits<double>::quiet_NaN());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const RdmVec llm_vec = vec_upper(build_rdm(layers[l], warnings));
        for (std::size_t c = 0; c < eeg_aligned.cols; ++c) {
            if (!evecs[c]) continue;
            try {
                grid.at(c, l) = spearman_rsa(*evecs[c], llm_vec).value;
            } catch (const Error& e) {
                warn(warnings, "electrode " + std::to_string(c) + " layer " +
                                   std::to_string(l) + " failed: " + e.what());
            }
        }
    }
    return grid;
}

}  // namespace xmrsa
