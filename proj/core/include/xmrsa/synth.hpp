#pragma once

#include <cstdint>
#include <vector>

#include "xmrsa/errors.hpp"

namespace xmrsa {

// Additive measurement model on length-m vectors: a shared latent
// z ~ N(0, sigma_z^2) observed through modality-specific noise, plus an
// optional confound q shared by the acoustic and model vectors only:
//
//   ac  = z + q + eps_ac
//   eeg = z     + eps_eeg
//   llm = z + q + eps_llm
struct NoiseModelCfg {
    std::size_t m = 1000;
    double sigma_z = 1.0;
    double sigma_ac = 1.0;
    double sigma_eeg = 1.0;
    double sigma_llm = 1.0;
    double sigma_q = 0.0;
    std::uint64_t seed = 0;
};

struct TriVectors {
    std::vector<double> ac, eeg, llm;
};

TriVectors gen_trimodal(const NoiseModelCfg& cfg);

// Expected correlation of two modalities sharing z under modality noise
// sigma_m, sigma_n:  sigma_z^2 / sqrt((sigma_z^2+sigma_m^2)(sigma_z^2+sigma_n^2)).
// Zero when sigma_z is zero (no shared signal). Throws AllZero when all
// three are zero.
double attenuation_expected(double sigma_z, double sigma_m, double sigma_n);

// Pearson with degenerate inputs mapped to 0; Monte-Carlo cells where one
// vector is identically zero then agree with the analytic 0.
double pearson_or_zero(const std::vector<double>& a,
                       const std::vector<double>& b);

struct AttenuationCell {
    double sigma_z, sigma_m, sigma_n;
    double expected;
    double observed_mean;
    double observed_se;  // sample sd / sqrt(n_seeds)
    std::size_t n_seeds;
};

// Two-modality experiment a = z + eps_m, b = z + eps_n over a sigma grid;
// one derived RNG stream per (cell, seed), so cells can run in parallel
// with identical results.
std::vector<AttenuationCell> attenuation_sweep(const std::vector<double>& grid,
                                               std::size_t m,
                                               std::size_t n_seeds,
                                               std::uint64_t seed,
                                               unsigned n_threads = 1);

struct DilutionRow {
    double sigma_q;
    double mean_ac_eeg, se_ac_eeg;
    double mean_eeg_llm, se_eeg_llm;
    double mean_ac_llm, se_ac_llm;
    double mean_tnc, se_tnc;  // mean of squared pairwise correlations / 3
};

// Sweeps the shared-confound strength with the other sigmas fixed by
// `base`; Pearson on the raw generated vectors (where the variance algebra
// is exact), TNC analog = mean of the three squared correlations.
std::vector<DilutionRow> dilution_experiment(const NoiseModelCfg& base,
                                             const std::vector<double>& sigma_q_grid,
                                             std::size_t n_seeds,
                                             unsigned n_threads = 1);

// Expected confounded pair correlation (sigma_z^2 + sigma_q^2) /
// sqrt((sigma_z^2+sigma_q^2+sigma_m^2)(sigma_z^2+sigma_q^2+sigma_n^2)).
double confounded_pair_expected(double sigma_z, double sigma_q, double sigma_m,
                                double sigma_n);

// Expected correlation of a confounded modality (noise sigma_conf) with the
// confound-free one (noise sigma_free): the confound enters only the
// denominator, sigma_z^2 / sqrt((sigma_z^2+sigma_q^2+sigma_conf^2)
// (sigma_z^2+sigma_free^2)).
double unconfounded_pair_expected(double sigma_z, double sigma_q,
                                  double sigma_conf, double sigma_free);

}  // namespace xmrsa
