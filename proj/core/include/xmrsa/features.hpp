#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"

namespace xmrsa {

// Frequency bands as (low, high) fractions of the token-grid Nyquist,
// 0 <= low < high <= 1. A band maps to the one-sided DFT bins k in
// [0, w/2] whose fraction 2k/w lies in [low, high); a band with high == 1
// also claims the Nyquist bin itself.
struct BandSpec {
    std::vector<std::pair<double, double>> bands;

    static BandSpec log_spaced_default();  // five equal-log bands up to Nyquist
    void validate() const;
};

struct FeatureConfig {
    // either list may be emptied to drop that feature block entirely
    std::vector<std::size_t> stats_windows = {3, 5, 9};  // odd, >= 3
    std::vector<std::size_t> fft_windows = {8, 16, 32};  // power of two, >= 4
    BandSpec bands = BandSpec::log_spaced_default();
    bool hann_taper = false;  // rectangular taper by default

    // raw + diff + diff2, stats triple and RMS per stats window,
    // band powers per spectral window
    std::size_t feature_dim() const {
        return 3 + 3 * stats_windows.size() + stats_windows.size() +
               fft_windows.size() * bands.bands.size();
    }
    void validate() const;
};

// Enriched per-electrode sequence: t_a rows, feature_dim() columns in the
// fixed order raw, diff, diff2, (mean, sd, max) per stats window, RMS per
// stats window, band powers per spectral window.
struct EnrichedSeq {
    std::string electrode;
    Mat values;  // t_a x d_r
};

// First/second discrete differences with zero fill at the boundary:
// diff[0] = 0 and diff2[0] = diff2[1] = 0. Needs length >= 3.
std::pair<std::vector<double>, std::vector<double>> diffs(
    const std::vector<double>& series);

// Windowed mean / population sd / max over the centered, boundary-truncated
// index window of length w (odd, >= 3). Columns: mean, sd, max.
Mat windowed_stats(const std::vector<double>& series, std::size_t w);

std::vector<double> windowed_rms(const std::vector<double>& series,
                                 std::size_t w);

// Per-token band powers: length-w_fft centered segment (zero-padded at the
// boundaries, optional Hann taper), DFT, sum of squared magnitudes over
// each band's bins. Output is series.size() x bands.size().
Mat band_powers(const std::vector<double>& series, std::size_t w_fft,
                const BandSpec& spec, bool hann_taper = false);

EnrichedSeq enrich_electrode(const std::vector<double>& series,
                             const FeatureConfig& cfg,
                             std::string electrode = {});

// Per-electrode Spearman RSA between the enriched sequence's RDM and the
// model RDM. eeg must already be resampled to the token axis; llm reduced
// per config. Failed electrodes are reported missing, not zero.
std::vector<std::optional<double>> electrode_similarity(
    const Mat& eeg_aligned, const Mat& llm, const FeatureConfig& cfg,
    Warnings* warnings = nullptr);

// Electrode x layer score grid; failed cells are NaN.
Mat layer_electrode_grid(const Mat& eeg_aligned,
                         const std::vector<Mat>& layers,
                         const FeatureConfig& cfg,
                         Warnings* warnings = nullptr);

}  // namespace xmrsa
