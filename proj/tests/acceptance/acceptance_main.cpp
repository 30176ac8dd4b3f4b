// Acceptance suite: eight go/no-go checks over the whole toolkit, one
// pass/fail line each. Every tolerance is pinned in code. Criterion 7
// drives the installed CLI binary end to end (pass its path via --cli).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "xmrsa/features.hpp"
#include "xmrsa/metrics.hpp"
#include "xmrsa/parallel.hpp"
#include "xmrsa/rdm.hpp"
#include "xmrsa/rng.hpp"
#include "xmrsa/significance.hpp"
#include "xmrsa/synth.hpp"
#include "xmrsa/timewin.hpp"
#include "xmrsa/tnc.hpp"

using namespace xmrsa;

namespace {

struct Ctx {
    std::vector<std::string> failures;
    std::filesystem::path cli;
    std::filesystem::path scratch;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

Mat random_mat(std::size_t rows, std::size_t cols, CounterRng& rng) {
    Mat m(rows, cols);
    for (double& v : m.data) v = rng.next_gaussian();
    return m;
}

Mat random_orthogonal(std::size_t n, CounterRng& rng) {
    Mat q(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> v(n);
        for (double& x : v) x = rng.next_gaussian();
        for (std::size_t prev = 0; prev < c; ++prev) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += v[i] * q.at(i, prev);
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q.at(i, prev);
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) q.at(i, c) = v[i] / norm;
    }
    return q;
}

Mat matmul(const Mat& a, const Mat& b) {
    Mat out(a.rows, b.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k)
            for (std::size_t j = 0; j < b.cols; ++j)
                out.at(i, j) += a.at(i, k) * b.at(k, j);
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// ---- criterion 1: metric identity suite ----
void criterion_identity(Ctx& ctx) {
    CounterRng shapes(101, {1});
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t t = 10 + shapes.next_below(191);   // [10, 200]
        const std::size_t d = 2 + shapes.next_below(49);     // [2, 50]
        CounterRng rng(101, {2, static_cast<std::uint64_t>(rep)});
        const Mat x = random_mat(t, d, rng);

        const RdmVec v = vec_upper(build_rdm(x));
        ctx.require(std::abs(pearson_rsa(v, v).value - 1.0) < 1e-9,
                    "pearson self != 1");
        ctx.require(std::abs(spearman_rsa(v, v).value - 1.0) < 1e-9,
                    "spearman self != 1");
        ctx.require(kendall_tau_b(v.values, v.values).value == 1.0,
                    "kendall self != 1 exactly");
        ctx.require(std::abs(dcor(x, x).value - 1.0) < 1e-9, "dcor self != 1");
        ctx.require(std::abs(rv_coefficient(x, x).value - 1.0) < 1e-9,
                    "rv self != 1");
        ctx.require(std::abs(cka(x, x, CkaKernel::Linear).value - 1.0) < 1e-9,
                    "cka-l self != 1");
        ctx.require(std::abs(cka(x, x, CkaKernel::Rbf).value - 1.0) < 1e-9,
                    "cka-rbf self != 1");
    }
}

// ---- criterion 2: invariance suite ----
void criterion_invariance(Ctx& ctx) {
    for (int rep = 0; rep < 50; ++rep) {
        CounterRng rng(202, {static_cast<std::uint64_t>(rep)});
        const std::size_t t = 12 + rng.next_below(24);
        const std::size_t d = 3 + rng.next_below(6);
        const Mat x = random_mat(t, d, rng);
        const Mat q = random_orthogonal(d, rng);

        Mat y = matmul(x, q);
        const double c = 0.25 + 3.0 * rng.next_double();
        Mat y_scaled = y;
        for (double& v : y_scaled.data) v *= c;
        ctx.require(
            std::abs(cka(x, y_scaled, CkaKernel::Linear).value - 1.0) < 1e-8,
            "linear cka not invariant to orthogonal+scale");
        ctx.require(std::abs(dcor(x, y).value - 1.0) < 1e-8,
                    "dcor not invariant to orthogonal transform");
        ctx.require(std::abs(cka(x, y, CkaKernel::Rbf).value - 1.0) < 1e-8,
                    "rbf cka not invariant to orthogonal transform");

        // strictly monotone transform of either rdm vector
        const RdmVec a = vec_upper(build_rdm(x));
        const RdmVec b = vec_upper(build_rdm(random_mat(t, d, rng)));
        RdmVec a_mono = a, b_mono = b;
        for (double& v : a_mono.values) v = std::exp(1.5 * v);
        for (double& v : b_mono.values) v = std::atan(2.0 * v) + 3.0 * v;
        const double base = spearman_rsa(a, b).value;
        ctx.require(std::abs(spearman_rsa(a_mono, b).value - base) < 1e-8,
                    "spearman not invariant to monotone map of a");
        ctx.require(std::abs(spearman_rsa(a, b_mono).value - base) < 1e-8,
                    "spearman not invariant to monotone map of b");
    }
}

// ---- criterion 3: oracle equivalence ----
double kendall_brute(const std::vector<double>& a,
                     const std::vector<double>& b) {
    std::int64_t concordant = 0, discordant = 0, tie_a = 0, tie_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool ta = a[i] == a[j], tb = b[i] == b[j];
            if (ta && tb) continue;
            if (ta) ++tie_a;
            else if (tb) ++tie_b;
            else if ((a[i] < a[j]) == (b[i] < b[j])) ++concordant;
            else ++discordant;
        }
    const double cd = static_cast<double>(concordant + discordant);
    const double d1 = cd + tie_a, d2 = cd + tie_b;
    return static_cast<double>(concordant - discordant) /
           (d1 == d2 ? d1 : std::sqrt(d1 * d2));
}

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
                if (!((frac >= lo && frac < hi) || (hi == 1.0 && frac == 1.0)))
                    continue;
                std::complex<double> x(0.0, 0.0);
                for (std::size_t m = 0; m < w; ++m) {
                    const double ang = -2.0 * std::numbers::pi *
                                       static_cast<double>(k * m) /
                                       static_cast<double>(w);
                    x += seg[m] *
                         std::complex<double>(std::cos(ang), std::sin(ang));
                }
                p += std::norm(x);
            }
            out.at(t, b) = p;
        }
    }
    return out;
}

void criterion_oracles(Ctx& ctx) {
    // fast Kendall vs pair enumeration, 1000 tied instances up to n=500
    bool kendall_ok = true;
    for (int rep = 0; rep < 1000 && kendall_ok; ++rep) {
        CounterRng rng(303, {static_cast<std::uint64_t>(rep)});
        const std::size_t n = 2 + rng.next_below(499);
        std::vector<double> a(n), b(n);
        const double qa = 1.0 + rng.next_below(5);
        const double qb = 1.0 + rng.next_below(5);
        for (double& v : a) v = std::round(rng.next_gaussian() * qa);
        for (double& v : b) v = std::round(rng.next_gaussian() * qb);
        const double expected = kendall_brute(a, b);
        if (!std::isfinite(expected)) continue;
        double got;
        try {
            got = kendall_tau_b(a, b).value;
        } catch (const AllTies&) {
            kendall_ok = false;
            break;
        }
        if (got != expected) kendall_ok = false;
    }
    ctx.require(kendall_ok, "fast kendall differs from brute force");

    // fast band powers vs direct DFT
    CounterRng rng(304, {1});
    std::vector<double> series(96);
    for (double& v : series) v = rng.next_gaussian();
    bool bands_ok = true;
    for (std::size_t w : {std::size_t{8}, std::size_t{16}, std::size_t{32}}) {
        const BandSpec spec = BandSpec::log_spaced_default();
        const Mat fast = band_powers(series, w, spec);
        const Mat direct = band_powers_direct(series, w, spec);
        for (std::size_t i = 0; i < fast.data.size(); ++i) {
            const double scale = std::max(1.0, std::abs(direct.data[i]));
            if (std::abs(fast.data[i] - direct.data[i]) / scale >= 1e-6)
                bands_ok = false;
        }
    }
    ctx.require(bands_ok, "fft band powers differ from direct dft");

    // RV on the fixed 4x2 instance vs hand trace arithmetic
    const Mat x(4, 2, {1, 1, -1, 1, 1, -1, -1, -1});
    const Mat y(4, 1, {1, -1, 1, -1});
    // columns are centered and orthogonal: ||X'Y||^2 = 16,
    // ||X'X||^2 = 32, ||Y'Y||^2 = 16 -> 16/sqrt(512)
    const double expected = 16.0 / std::sqrt(32.0 * 16.0);
    ctx.require(std::abs(rv_coefficient(x, y).value - expected) < 1e-12,
                "rv fixed instance mismatch");
}

// ---- criterion 4: permutation estimator ----
void criterion_permutation(Ctx& ctx) {
    CounterRng rng(404, {1});
    const Mat x = random_mat(30, 5, rng);
    const PermResult top = perm_test(x, x, Metric::PearsonRSA, 500, 11);
    ctx.require(top.n_ge == 0, "observed not above all nulls");
    ctx.require(top.p_value == 1.0 / 501.0, "p != 1/501 exactly");

    // batch-size invariance, bit exact
    PermTestOptions b1, b2, b3;
    b1.batch = 1;
    b2.batch = 37;
    b3.batch = 16384;
    b3.n_threads = 4;
    const Mat y = random_mat(30, 5, rng);
    const PermResult r1 = perm_test(x, y, Metric::SpearmanRSA, 500, 13, b1);
    const PermResult r2 = perm_test(x, y, Metric::SpearmanRSA, 500, 13, b2);
    const PermResult r3 = perm_test(x, y, Metric::SpearmanRSA, 500, 13, b3);
    ctx.require(r1.p_value == r2.p_value && r2.p_value == r3.p_value &&
                    r1.null_mean == r2.null_mean &&
                    r2.null_mean == r3.null_mean &&
                    r1.null_sd == r2.null_sd && r2.null_sd == r3.null_sd,
                "estimator not batch-size invariant");

    // null uniformity across the permutation grid
    std::vector<double> ps;
    for (int rep = 0; rep < 200; ++rep) {
        CounterRng g(405, {static_cast<std::uint64_t>(rep)});
        const Mat a = random_mat(20, 3, g);
        const Mat b = random_mat(20, 3, g);
        ps.push_back(perm_test(a, b, Metric::PearsonRSA, 500,
                               static_cast<std::uint64_t>(1000 + rep))
                         .p_value);
    }
    std::sort(ps.begin(), ps.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        ks = std::max(ks, static_cast<double>(i + 1) / ps.size() - ps[i]);
        ks = std::max(ks, ps[i] - static_cast<double>(i) / ps.size());
    }
    ctx.require(ks < 0.12, "null p-values not uniform, KS = " +
                               std::to_string(ks));
}

// ---- criterion 5: TNC theory suite ----
void criterion_tnc(Ctx& ctx) {
    CounterRng rng(505, {1});
    for (int i = 0; i < 10000; ++i) {
        const double r1 = rng.next_double() * 2.0 - 1.0;
        const double r2 = rng.next_double() * 2.0 - 1.0;
        const double r3 = rng.next_double() * 2.0 - 1.0;
        const double t = tnc_from_rhos(r1, r2, r3);
        ctx.require(t >= 0.0 && t <= 1.0, "tnc out of [0,1]");
        ctx.require(std::abs(t - tnc_frobenius_check(r1, r2, r3)) < 1e-12,
                    "frobenius identity violated");
        ctx.require(t == tnc_from_rhos(-r1, r2, r3) &&
                        t == tnc_from_rhos(r1, -r2, r3) &&
                        t == tnc_from_rhos(r1, r2, -r3),
                    "sign invariance not exact");
    }
    for (const double delta : {0.01, 0.05}) {
        // rejection sampling concentrated within 3*delta of |rho| = 1
        const double scale = 3.0 * delta;
        int accepted = 0;
        for (int i = 0; i < 30000; ++i) {
            const double r1 = (rng.next_below(2) ? 1 : -1) *
                              (1.0 - scale * rng.next_double());
            const double r2 = (rng.next_below(2) ? 1 : -1) *
                              (1.0 - scale * rng.next_double());
            const double r3 = (rng.next_below(2) ? 1 : -1) *
                              (1.0 - scale * rng.next_double());
            if (tnc_from_rhos(r1, r2, r3) < 1.0 - delta) continue;
            ++accepted;
            const double bound = 1.0 - 3.0 * delta;
            ctx.require(r1 * r1 >= bound && r2 * r2 >= bound &&
                            r3 * r3 >= bound,
                        "near-1 bound violated at delta=" +
                            std::to_string(delta));
        }
        ctx.require(accepted > 100, "too few samples above the tnc bar");
    }
}

// ---- criterion 6: noise-model Monte Carlo ----
void criterion_montecarlo(Ctx& ctx) {
    const unsigned threads = default_thread_count();
    const auto cells =
        attenuation_sweep({0.0, 0.5, 1.0, 2.0}, 100000, 50, 609, threads);
    ctx.require(cells.size() == 63, "expected 63 grid cells");
    ctx.require(attenuation_expected(1, 1, 1) == 0.5,
                "analytic value at (1,1,1) is not 0.5");
    for (const auto& c : cells) {
        const double slack = 3.0 * c.observed_se + 1e-9;
        if (std::abs(c.observed_mean - c.expected) > slack) {
            std::ostringstream os;
            os << "attenuation cell (" << c.sigma_z << "," << c.sigma_m << ","
               << c.sigma_n << ") off by "
               << std::abs(c.observed_mean - c.expected) << " > " << slack;
            ctx.require(false, os.str());
        }
    }

    // dilution direction under a growing shared confound
    NoiseModelCfg base;
    base.m = 100000;
    base.sigma_z = 1.0;
    base.seed = 607;
    const auto rows =
        dilution_experiment(base, {0.0, 0.5, 1.0, 2.0, 4.0}, 50, threads);
    for (std::size_t g = 1; g < rows.size(); ++g) {
        const double band_al = 2.0 * (rows[g].se_ac_llm + rows[g - 1].se_ac_llm);
        ctx.require(rows[g].mean_ac_llm >= rows[g - 1].mean_ac_llm - band_al,
                    "confounded pair decreased in sigma_q");
        const double band_ae = 2.0 * (rows[g].se_ac_eeg + rows[g - 1].se_ac_eeg);
        ctx.require(rows[g].mean_ac_eeg <= rows[g - 1].mean_ac_eeg + band_ae,
                    "ac-eeg increased with the confound");
        const double band_el =
            2.0 * (rows[g].se_eeg_llm + rows[g - 1].se_eeg_llm);
        ctx.require(rows[g].mean_eeg_llm <= rows[g - 1].mean_eeg_llm + band_el,
                    "eeg-llm increased with the confound");
    }

    // factor-3 special case with no latent signal
    NoiseModelCfg pure;
    pure.m = 100000;
    pure.sigma_z = 0.0;
    pure.seed = 608;
    const auto special = dilution_experiment(pure, {4.0}, 50, threads);
    const double rho = confounded_pair_expected(0.0, 4.0, 1.0, 1.0);
    ctx.require(std::abs(special[0].mean_tnc - rho * rho / 3.0) <= 0.03,
                "factor-3 dilution outside 0.03");
}

// ---- criterion 7: pipeline smoke test through the CLI ----
void criterion_pipeline(Ctx& ctx) {
    if (ctx.cli.empty()) {
        ctx.require(false, "no --cli path given");
        return;
    }
    const auto dir = ctx.scratch / "smoke";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto sh = [&](const std::string& cmd) {
        return std::system((cmd + " > /dev/null 2>&1").c_str());
    };
    const std::string cli = ctx.cli.string();
    ctx.require(sh(cli + " gen-fixtures --out " + (dir / "fx").string() +
                   " --seed 7") == 0,
                "gen-fixtures failed");
    const std::string manifest = (dir / "fx" / "manifest.json").string();
    const std::string base = cli + " score --manifest " + manifest +
                             " --seed 42 --threads 4 --out ";
    ctx.require(sh(base + (dir / "o1").string()) == 0, "first score run failed");
    ctx.require(sh(base + (dir / "o2").string()) == 0, "second score run failed");

    const std::string s1 = slurp(dir / "o1" / "scores.csv");
    const std::string s2 = slurp(dir / "o2" / "scores.csv");
    ctx.require(!s1.empty() && s1 == s2, "scores.csv not byte-identical");
    ctx.require(slurp(dir / "o1" / "best_layer.csv") ==
                    slurp(dir / "o2" / "best_layer.csv"),
                "best_layer.csv not byte-identical");

    std::istringstream best(slurp(dir / "o1" / "best_layer.csv"));
    std::string line;
    std::getline(best, line);  // header
    int rows = 0;
    bool all_signal_layer = true;
    while (std::getline(best, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string metric, layer;
        std::getline(ss, metric, ',');
        std::getline(ss, layer, ',');
        if (layer != "1") all_signal_layer = false;
    }
    ctx.require(rows == 8, "expected 8 best-layer rows");
    ctx.require(all_signal_layer, "best layer != constructed layer");
}

// ---- criterion 8: window bookkeeping ----
void criterion_windows(Ctx& ctx) {
    const TokenWindow w = token_window(4, 1000.0, 250.0, 500.0);
    ctx.require(w.degenerate() && w.indices.size() == 1,
                "T_a=4 window [250,500) not degenerate");

    CounterRng rng(808, {1});
    Mat eeg = random_mat(4, 3, rng), llm = random_mat(4, 3, rng);
    const auto deg = windowed_rsa(eeg, llm, 1000.0, {{250.0, 500.0}});
    ctx.require(!deg[0].rsa.has_value(), "degenerate window not omitted");

    const Mat eeg2 = random_mat(40, 5, rng), llm2 = random_mat(40, 5, rng);
    const auto full = windowed_rsa(eeg2, llm2, 1000.0, {{0.0, 1000.0}});
    const double direct = spearman_rsa(vec_upper(build_rdm(eeg2)),
                                       vec_upper(build_rdm(llm2)))
                              .value;
    ctx.require(full[0].rsa.has_value() && *full[0].rsa == direct,
                "full-range window != unwindowed rsa");
}

struct Criterion {
    int id;
    const char* label;
    double time_limit_s;
    std::function<void(Ctx&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    Ctx ctx;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc) ctx.cli = argv[++i];
        else if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    ctx.scratch = std::filesystem::temp_directory_path() /
                  ("xmrsa_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(ctx.scratch);

    const std::vector<Criterion> criteria = {
        {1, "metric identity suite", 30.0, criterion_identity},
        {2, "invariance suite", 0.0, criterion_invariance},
        {3, "oracle equivalence", 0.0, criterion_oracles},
        {4, "permutation estimator", 0.0, criterion_permutation},
        {5, "tnc theory suite", 0.0, criterion_tnc},
        {6, "noise-model monte carlo", 300.0, criterion_montecarlo},
        {7, "pipeline smoke test", 60.0, criterion_pipeline},
        {8, "window bookkeeping", 0.0, criterion_windows},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        ctx.failures.clear();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.fn(ctx);
        } catch (const std::exception& e) {
            ctx.failures.push_back(std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s)
            ctx.failures.push_back("runtime " + std::to_string(secs) +
                                   "s over limit " +
                                   std::to_string(c.time_limit_s) + "s");
        char timing[32];
        std::snprintf(timing, sizeof(timing), "%.1fs", secs);
        if (ctx.failures.empty()) {
            std::cout << "[PASS] criterion " << c.id << ": " << c.label << " ("
                      << timing << ")\n";
        } else {
            ++failed;
            std::cout << "[FAIL] criterion " << c.id << ": " << c.label << " ("
                      << timing << ") - " << ctx.failures.front();
            if (ctx.failures.size() > 1)
                std::cout << " (+" << ctx.failures.size() - 1 << " more)";
            std::cout << "\n";
        }
    }

    std::error_code ec;
    std::filesystem::remove_all(ctx.scratch, ec);
    return failed == 0 ? 0 : 1;
}
