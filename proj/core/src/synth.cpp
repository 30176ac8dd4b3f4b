#include "xmrsa/synth.hpp"

#include <cmath>

#include "xmrsa/metrics.hpp"
#include "xmrsa/parallel.hpp"
#include "xmrsa/rng.hpp"

namespace xmrsa {

namespace {

// Stream-path tags for the generator components.
constexpr std::uint64_t kZStream = 10;
constexpr std::uint64_t kQStream = 11;
constexpr std::uint64_t kAcStream = 12;
constexpr std::uint64_t kEegStream = 13;
constexpr std::uint64_t kLlmStream = 14;

std::vector<double> gaussian_vector(std::uint64_t seed, std::uint64_t stream,
                                    std::size_t m, double sigma) {
    std::vector<double> v(m, 0.0);
    if (sigma == 0.0) return v;
    CounterRng rng(seed, {stream});
    for (std::size_t i = 0; i < m; ++i) v[i] = sigma * rng.next_gaussian();
    return v;
}

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

TriVectors gen_trimodal(const NoiseModelCfg& cfg) {
    const auto z = gaussian_vector(cfg.seed, kZStream, cfg.m, cfg.sigma_z);
    const auto q = gaussian_vector(cfg.seed, kQStream, cfg.m, cfg.sigma_q);
    TriVectors out;
    out.ac = gaussian_vector(cfg.seed, kAcStream, cfg.m, cfg.sigma_ac);
    out.eeg = gaussian_vector(cfg.seed, kEegStream, cfg.m, cfg.sigma_eeg);
    out.llm = gaussian_vector(cfg.seed, kLlmStream, cfg.m, cfg.sigma_llm);
    for (std::size_t i = 0; i < cfg.m; ++i) {
        out.ac[i] += z[i] + q[i];
        out.eeg[i] += z[i];
        out.llm[i] += z[i] + q[i];
    }
    return out;
}

double attenuation_expected(double sigma_z, double sigma_m, double sigma_n) {
    if (sigma_z == 0.0 && sigma_m == 0.0 && sigma_n == 0.0) throw AllZero();
    if (sigma_z == 0.0) return 0.0;
    const double vz = sigma_z * sigma_z;
    return vz / std::sqrt((vz + sigma_m * sigma_m) * (vz + sigma_n * sigma_n));
}

double confounded_pair_expected(double sigma_z, double sigma_q, double sigma_m,
                                double sigma_n) {
    const double shared = sigma_z * sigma_z + sigma_q * sigma_q;
    if (shared == 0.0) return 0.0;
    return shared / std::sqrt((shared + sigma_m * sigma_m) *
                              (shared + sigma_n * sigma_n));
}

double unconfounded_pair_expected(double sigma_z, double sigma_q,
                                  double sigma_conf, double sigma_free) {
    const double vz = sigma_z * sigma_z;
    if (vz == 0.0) return 0.0;
    return vz / std::sqrt((vz + sigma_q * sigma_q + sigma_conf * sigma_conf) *
                          (vz + sigma_free * sigma_free));
}

double pearson_or_zero(const std::vector<double>& a,
                       const std::vector<double>& b) {
    try {
        return pearson(a, b);
    } catch (const Error&) {
        return 0.0;
    }
}

std::vector<AttenuationCell> attenuation_sweep(const std::vector<double>& grid,
                                               std::size_t m,
                                               std::size_t n_seeds,
                                               std::uint64_t seed,
                                               unsigned n_threads) {
    struct Cell {
        double sz, sm, sn;
    };
    std::vector<Cell> cells;
    for (double sz : grid)
        for (double sm : grid)
            for (double sn : grid) {
                if (sz == 0.0 && sm == 0.0 && sn == 0.0) continue;
                cells.push_back({sz, sm, sn});
            }

    std::vector<std::vector<double>> observed(cells.size(),
                                              std::vector<double>(n_seeds));
    parallel_for(cells.size() * n_seeds, n_threads, [&](std::size_t task) {
        const std::size_t c = task / n_seeds;
        const std::size_t s = task % n_seeds;
        const std::uint64_t cell_seed =
            CounterRng::stream_key(seed, {c, s});
        const auto z = gaussian_vector(cell_seed, kZStream, m, cells[c].sz);
        auto a = gaussian_vector(cell_seed, kAcStream, m, cells[c].sm);
        auto b = gaussian_vector(cell_seed, kLlmStream, m, cells[c].sn);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] += z[i];
            b[i] += z[i];
        }
        observed[c][s] = pearson_or_zero(a, b);
    });

    std::vector<AttenuationCell> out;
    out.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [mean, se] = mean_se(observed[c]);
        out.push_back({cells[c].sz, cells[c].sm, cells[c].sn,
                       attenuation_expected(cells[c].sz, cells[c].sm,
                                            cells[c].sn),
                       mean, se, n_seeds});
    }
    return out;
}

std::vector<DilutionRow> dilution_experiment(const NoiseModelCfg& base,
                                             const std::vector<double>& sigma_q_grid,
                                             std::size_t n_seeds,
                                             unsigned n_threads) {
    struct Draw {
        double ae, el, al, tnc;
    };
    std::vector<std::vector<Draw>> draws(sigma_q_grid.size(),
                                         std::vector<Draw>(n_seeds));
    parallel_for(sigma_q_grid.size() * n_seeds, n_threads,
                 [&](std::size_t task) {
                     const std::size_t g = task / n_seeds;
                     const std::size_t s = task % n_seeds;
                     NoiseModelCfg cfg = base;
                     cfg.sigma_q = sigma_q_grid[g];
                     cfg.seed = CounterRng::stream_key(base.seed, {g, s});
                     const TriVectors v = gen_trimodal(cfg);
                     Draw d;
                     d.ae = pearson_or_zero(v.ac, v.eeg);
                     d.el = pearson_or_zero(v.eeg, v.llm);
                     d.al = pearson_or_zero(v.ac, v.llm);
                     d.tnc = (d.ae * d.ae + d.el * d.el + d.al * d.al) / 3.0;
                     draws[g][s] = d;
                 });

    std::vector<DilutionRow> out;
    out.reserve(sigma_q_grid.size());
    for (std::size_t g = 0; g < sigma_q_grid.size(); ++g) {
        std::vector<double> ae(n_seeds), el(n_seeds), al(n_seeds), tnc(n_seeds);
        for (std::size_t s = 0; s < n_seeds; ++s) {
            ae[s] = draws[g][s].ae;
            el[s] = draws[g][s].el;
            al[s] = draws[g][s].al;
            tnc[s] = draws[g][s].tnc;
        }
        const auto [m_ae, se_ae] = mean_se(ae);
        const auto [m_el, se_el] = mean_se(el);
        const auto [m_al, se_al] = mean_se(al);
        const auto [m_tnc, se_tnc] = mean_se(tnc);
        out.push_back({sigma_q_grid[g], m_ae, se_ae, m_el, se_el, m_al, se_al,
                       m_tnc, se_tnc});
    }
    return out;
}

}  // namespace xmrsa
