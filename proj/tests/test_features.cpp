#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "test_util.hpp"
#include "xmrsa/features.hpp"

using namespace xmrsa;
using testutil::random_mat;

namespace {

// Direct O(w^2) DFT band-power oracle with its own segment extraction.
Mat band_powers_direct(const std::vector<double>& series, std::size_t w,
                       const BandSpec& spec) {
    const std::size_t n = series.size();
    Mat out(n, spec.bands.size(), 0.0);
    const std::ptrdiff_t back = static_cast<std::ptrdiff_t>((w - 1) / 2);
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<double> seg(w, 0.0);
        for (std::size_t i = 0; i < w; ++i) {
            const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) - back +
                                       static_cast<std::ptrdiff_t>(i);
            if (src >= 0 && src < static_cast<std::ptrdiff_t>(n))
                seg[i] = series[static_cast<std::size_t>(src)];
        }
        for (std::size_t b = 0; b < spec.bands.size(); ++b) {
            const auto [lo, hi] = spec.bands[b];
            double p = 0.0;
            for (std::size_t k = 0; k <= w / 2; ++k) {
                const double frac =
                    2.0 * static_cast<double>(k) / static_cast<double>(w);
                const bool in_band =
                    (frac >= lo && frac < hi) || (hi == 1.0 && frac == 1.0);
                if (!in_band) continue;
                std::complex<double> x(0.0, 0.0);
                for (std::size_t m = 0; m < w; ++m) {
                    const double ang = -2.0 * std::numbers::pi *
                                       static_cast<double>(k * m) /
                                       static_cast<double>(w);
                    x += seg[m] * std::complex<double>(std::cos(ang),
                                                       std::sin(ang));
                }
                p += std::norm(x);
            }
            out.at(t, b) = p;
        }
    }
    return out;
}

std::vector<double> random_series(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, {42});
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_gaussian();
    return v;
}

}  // namespace

TEST_CASE("discrete differences with the zero boundary rule") {
    const auto [d1, d2] = diffs({1, 2, 4});
    CHECK(d1 == std::vector<double>({0, 1, 2}));
    CHECK(d2 == std::vector<double>({0, 0, 1}));

    const auto [c1, c2] = diffs({3, 3, 3, 3});
    CHECK(c1 == std::vector<double>({0, 0, 0, 0}));
    CHECK(c2 == std::vector<double>({0, 0, 0, 0}));

    const auto [r1, r2] = diffs({0, 2, 4, 6, 8});
    for (std::size_t t = 1; t < 5; ++t) CHECK(r1[t] == 2.0);
    for (std::size_t t = 2; t < 5; ++t) CHECK(r2[t] == 0.0);

    CHECK_THROWS_AS(diffs({1, 2}), TooShort);
}

TEST_CASE("windowed statistics on the worked example") {
    const Mat st = windowed_stats({1, 2, 4}, 3);
    // center position: full window {1,2,4}
    CHECK(st.at(1, 0) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
    CHECK(st.at(1, 1) == doctest::Approx(std::sqrt(14.0 / 9.0)).epsilon(1e-12));
    CHECK(st.at(1, 2) == 4.0);
    // first position: truncated window {1,2}
    CHECK(st.at(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(st.at(0, 2) == 2.0);

    const Mat flat = windowed_stats({5, 5, 5, 5}, 3);
    for (std::size_t t = 0; t < 4; ++t) {
        CHECK(flat.at(t, 0) == 5.0);
        CHECK(flat.at(t, 1) == 0.0);
        CHECK(flat.at(t, 2) == 5.0);
    }

    CHECK_THROWS_AS(windowed_stats({1, 2, 3}, 4), BadWindow);
}

TEST_CASE("windowed rms is sign-insensitive") {
    const auto r = windowed_rms({3, 4}, 3);
    CHECK(r[0] == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));

    const double a = 2.75;
    for (double v : windowed_rms({-a, a, -a}, 3))
        CHECK(v == doctest::Approx(a).epsilon(1e-12));

    for (double v : windowed_rms({0, 0, 0, 0}, 5)) CHECK(v == 0.0);
}

TEST_CASE("interior band powers of a constant series vanish off DC") {
    // default bands exclude the DC bin; zero-padding makes edge tokens
    // leak, so the claim holds where the window fits entirely inside
    const std::vector<double> series(64, 3.0);
    const std::size_t w = 8;
    const Mat bp = band_powers(series, w, BandSpec::log_spaced_default());
    for (std::size_t t = w; t + w < series.size(); ++t)
        for (std::size_t b = 0; b < bp.cols; ++b)
            CHECK(std::abs(bp.at(t, b)) < 1e-18);
}

TEST_CASE("alternating series concentrates interior energy at Nyquist") {
    std::vector<double> series(64);
    for (std::size_t i = 0; i < series.size(); ++i)
        series[i] = i % 2 == 0 ? 1.0 : -1.0;
    BandSpec spec;
    spec.bands = {{0.0, 0.5}, {0.5, 0.9}, {0.9, 1.0}};
    // only the last band claims the Nyquist bin (high == 1)
    const std::size_t w = 16;
    const Mat bp = band_powers(series, w, spec);
    for (std::size_t t = w; t + w < series.size(); ++t) {
        CHECK(std::abs(bp.at(t, 0)) < 1e-18);
        CHECK(std::abs(bp.at(t, 1)) < 1e-18);
        // |X(w/2)|^2 = w^2 for a full-scale alternation
        CHECK(bp.at(t, 2) == doctest::Approx(double(w) * w).epsilon(1e-9));
    }
}

TEST_CASE("fft band powers equal the direct dft oracle") {
    const auto series = random_series(70, 9);
    for (std::size_t w : {std::size_t{8}, std::size_t{16}, std::size_t{32}}) {
        const BandSpec spec = BandSpec::log_spaced_default();
        const Mat fast = band_powers(series, w, spec);
        const Mat direct = band_powers_direct(series, w, spec);
        for (std::size_t t = 0; t < fast.rows; ++t)
            for (std::size_t b = 0; b < fast.cols; ++b) {
                const double scale = std::max(1.0, std::abs(direct.at(t, b)));
                CHECK(std::abs(fast.at(t, b) - direct.at(t, b)) / scale <
                      1e-6);
            }
    }
}

TEST_CASE("sinusoid at quarter sampling rate lands in bin 2 of w=8") {
    std::vector<double> series(48);
    for (std::size_t i = 0; i < series.size(); ++i)
        series[i] = std::sin(2.0 * std::numbers::pi * 0.25 *
                             static_cast<double>(i));
    BandSpec spec;
    spec.bands = {{0.0, 0.4}, {0.4, 0.6}, {0.6, 1.0}};  // bin2 of 8 -> 0.5
    const Mat bp = band_powers(series, 8, spec);
    const Mat oracle = band_powers_direct(series, 8, spec);
    for (std::size_t t = 8; t + 8 < series.size(); ++t) {
        CHECK(bp.at(t, 1) > 100.0 * std::max(bp.at(t, 0), bp.at(t, 2)));
        CHECK(bp.at(t, 1) == doctest::Approx(oracle.at(t, 1)).epsilon(1e-9));
    }
}

TEST_CASE("enriched dimension bookkeeping") {
    FeatureConfig defaults;
    CHECK(defaults.feature_dim() == 30);  // 3 + 9 + 3 + 15

    FeatureConfig single;
    single.stats_windows = {5};
    single.fft_windows = {8};
    CHECK(single.feature_dim() == 3 + 3 + 1 + single.bands.bands.size());

    const auto series = random_series(40, 3);
    const EnrichedSeq seq = enrich_electrode(series, defaults, "cz");
    CHECK(seq.values.rows == 40);
    CHECK(seq.values.cols == 30);
    CHECK(seq.electrode == "cz");
}

TEST_CASE("constant input zeroes the dynamic columns") {
    FeatureConfig cfg;
    cfg.stats_windows = {3};
    cfg.fft_windows = {8};
    const std::vector<double> series(32, 4.0);
    const EnrichedSeq seq = enrich_electrode(series, cfg);
    // columns: raw, d1, d2, mean, sd, max, rms, bands...
    for (std::size_t t = 0; t < seq.values.rows; ++t) {
        CHECK(seq.values.at(t, 0) == 4.0);   // raw
        CHECK(seq.values.at(t, 1) == 0.0);   // d1
        CHECK(seq.values.at(t, 2) == 0.0);   // d2
        CHECK(seq.values.at(t, 3) == 4.0);   // windowed mean
        CHECK(seq.values.at(t, 4) == 0.0);   // windowed sd
        CHECK(seq.values.at(t, 5) == 4.0);   // windowed max
        CHECK(seq.values.at(t, 6) == 4.0);   // rms
    }
    for (std::size_t t = 8; t + 8 < seq.values.rows; ++t)
        for (std::size_t b = 7; b < seq.values.cols; ++b)
            CHECK(std::abs(seq.values.at(t, b)) < 1e-18);
}

TEST_CASE("enrich rejects series shorter than the largest window") {
    FeatureConfig cfg;  // max window 32
    CHECK_THROWS_AS(enrich_electrode(random_series(20, 1), cfg), TooShort);
}

TEST_CASE("electrode similarity is 1 when the model equals the enrichment") {
    FeatureConfig cfg;
    cfg.stats_windows = {3};
    cfg.fft_windows = {8};
    const auto series = random_series(36, 5);
    const EnrichedSeq seq = enrich_electrode(series, cfg);

    Mat eeg(36, 1);
    for (std::size_t t = 0; t < 36; ++t) eeg.at(t, 0) = series[t];
    const auto scores = electrode_similarity(eeg, seq.values, cfg);
    REQUIRE(scores.size() == 1);
    REQUIRE(scores[0].has_value());
    CHECK(*scores[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("independent electrodes score near zero") {
    FeatureConfig cfg;
    cfg.stats_windows = {3};
    cfg.fft_windows = {8};
    CounterRng rng(6, {1});
    const Mat eeg = random_mat(100, 4, rng);
    const Mat llm = random_mat(100, 6, rng);
    const auto scores = electrode_similarity(eeg, llm, cfg);
    double mean_abs = 0.0;
    for (const auto& s : scores) {
        REQUIRE(s.has_value());
        mean_abs += std::abs(*s);
    }
    CHECK(mean_abs / static_cast<double>(scores.size()) < 0.1);
}

TEST_CASE("signal-carrying electrode beats a noise electrode") {
    FeatureConfig cfg;
    cfg.stats_windows = {3};
    cfg.fft_windows = {8};
    int wins = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        CounterRng rng(s, {77});
        std::vector<double> drive(80);
        drive[0] = rng.next_gaussian();
        for (std::size_t t = 1; t < 80; ++t)
            drive[t] = 0.85 * drive[t - 1] + rng.next_gaussian();

        // model states = the signal electrode's enrichment plus noise
        // scaled to each feature column
        Mat llm = enrich_electrode(drive, cfg).values;
        for (std::size_t j = 0; j < llm.cols; ++j) {
            double mean = 0.0, ss = 0.0;
            for (std::size_t t = 0; t < llm.rows; ++t) mean += llm.at(t, j);
            mean /= static_cast<double>(llm.rows);
            for (std::size_t t = 0; t < llm.rows; ++t)
                ss += (llm.at(t, j) - mean) * (llm.at(t, j) - mean);
            const double sd = std::sqrt(ss / static_cast<double>(llm.rows));
            for (std::size_t t = 0; t < llm.rows; ++t)
                llm.at(t, j) += 0.5 * sd * rng.next_gaussian();
        }

        Mat eeg(80, 2);
        for (std::size_t t = 0; t < 80; ++t) {
            eeg.at(t, 0) = drive[t];              // tracks the model signal
            eeg.at(t, 1) = rng.next_gaussian();   // noise
        }
        const auto scores = electrode_similarity(eeg, llm, cfg);
        if (*scores[0] > *scores[1]) ++wins;
    }
    CHECK(wins >= 19);
}

TEST_CASE("similarity survives a global positive rescale of the eeg") {
    // band powers scale quadratically while the time-domain features scale
    // linearly, so the exact invariance claim is for the homogeneous
    // (stats/rms) configuration under one global positive factor
    FeatureConfig cfg;
    cfg.stats_windows = {3, 5};
    cfg.fft_windows.clear();
    CounterRng rng(31, {9});
    const Mat eeg = random_mat(60, 3, rng);
    const Mat llm = random_mat(60, 4, rng);
    Mat scaled = eeg;
    for (double& v : scaled.data) v *= 37.5;

    const auto base = electrode_similarity(eeg, llm, cfg);
    const auto after = electrode_similarity(scaled, llm, cfg);
    for (std::size_t c = 0; c < base.size(); ++c) {
        REQUIRE(base[c].has_value());
        REQUIRE(after[c].has_value());
        CHECK(std::abs(*base[c] - *after[c]) < 1e-9);
    }
}

TEST_CASE("layer grid reduces to electrode similarity for one layer") {
    FeatureConfig cfg;
    cfg.stats_windows = {3};
    cfg.fft_windows = {8};
    CounterRng rng(9, {2});
    const Mat eeg = random_mat(60, 3, rng);
    const Mat llm = random_mat(60, 4, rng);
    const auto single = electrode_similarity(eeg, llm, cfg);
    const Mat grid = layer_electrode_grid(eeg, {llm, llm}, cfg);
    REQUIRE(grid.rows == 3);
    REQUIRE(grid.cols == 2);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(grid.at(c, 0) == *single[c]);
        CHECK(grid.at(c, 0) == grid.at(c, 1));  // duplicated layer
        CHECK(grid.at(c, 0) >= -1.0);
        CHECK(grid.at(c, 0) <= 1.0);
    }
}

TEST_CASE("band spec validation") {
    BandSpec bad;
    bad.bands = {{0.5, 0.4}};
    CHECK_THROWS_AS(bad.validate(), BadWindow);
    CHECK_THROWS_AS(band_powers({1, 2, 3, 4}, 6, BandSpec::log_spaced_default()),
                    BadWindow);
}
