#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xmrsa/features.hpp"
#include "xmrsa/manifest.hpp"
#include "xmrsa/metrics.hpp"
#include "xmrsa/timewin.hpp"

namespace xmrsa {

// Full pipeline configuration. Defaults follow the reference analysis
// settings (k=20 components, 500 permutations, tau_v=0.45, K=4, window
// sets {3,5,9} and {8,16,32}).
struct RunConfig {
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;

    std::size_t pca_k = 20;
    bool pca_enabled = true;

    std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::size_t n_perm = 500;
    std::size_t perm_batch = 16384;
    bool permute_model_side = true;  // permute model rows, EEG untouched

    std::vector<std::pair<double, double>> windows_ms = default_windows_ms();
    FeatureConfig features;

    double tau_v = 0.45;
    std::array<double, 3> affect_weights = {0.55, -0.25, -0.20};
    std::size_t kmeans_k = 4;

    std::optional<std::size_t> layer;  // analysis layer; default = last

    // score: also write each sentence's EEG and analysis-layer RDM as
    // matrix files under <out>/rdms (paired-RDM visualizations)
    bool export_rdms = false;
    // windows: additionally compute electrode-wise RSA per window using
    // the enriched per-electrode features
    bool per_electrode_windows = false;

    unsigned n_threads = 1;
};

// Sentence-level tensors after the standard preparation path: per-electrode
// z-scoring, linear resampling onto the token grid, and (optionally) PCA
// per sentence per modality.
struct SentenceData {
    std::string id;
    double duration_ms = 0.0;
    std::size_t t_a = 0;
    std::vector<std::string> channels;
    Mat eeg_aligned;                 // T_a x C, z-scored + resampled
    Mat eeg_reduced;                 // T_a x k
    std::vector<Mat> layers_reduced; // L entries, T_a x k
    std::optional<Mat> acoustic_reduced;  // T_a x k_ac
};

SentenceData prepare_sentence(const SentenceRecord& rec, const RunConfig& cfg,
                              Warnings* warnings = nullptr);

// Subcommand drivers; each writes CSV artifacts plus run_meta.json into
// cfg.out_dir and returns a process exit code (0 ok, 1 total failure,
// 2 configuration error). Reruns with the same config and seed produce
// byte-identical CSV bodies; timestamps live only in the metadata file.
int run_score(const RunConfig& cfg);
int run_tnc(const RunConfig& cfg);
int run_windows(const RunConfig& cfg);
int run_topo(const RunConfig& cfg, bool write_svg = true);
int run_partition(const RunConfig& cfg,
                  const std::optional<std::filesystem::path>& scores_csv,
                  const std::optional<std::filesystem::path>& tnc_csv);

struct SynthConfig {
    std::vector<double> sigma_grid = {0.0, 0.5, 1.0, 2.0};
    std::size_t m = 100000;
    std::size_t n_seeds = 50;
    std::vector<double> sigma_q_grid = {0.0, 0.5, 1.0, 2.0, 4.0};
    double dilution_sigma_z = 1.0;
};

int run_synth(const RunConfig& cfg, const SynthConfig& synth);

int run_permtest(const std::filesystem::path& x_path,
                 const std::filesystem::path& y_path, Metric metric,
                 const RunConfig& cfg);

int validate_manifest_cmd(const std::filesystem::path& manifest_path);

// Synthetic dataset for smoke tests and demos: n_sentences sentences with
// n_layers model layers each; the EEG epoch equals the hidden states of
// `signal_layer` while other layers are independent noise, so every metric
// should pick signal_layer as the best layer.
struct FixtureSpec {
    std::size_t n_sentences = 3;
    std::size_t n_layers = 2;
    std::size_t signal_layer = 1;
    std::size_t t_a = 48;        // tokens of the first sentence; +4 per sentence
    std::size_t dims = 16;       // model dims == EEG channels
    std::uint64_t seed = 7;
};

std::filesystem::path gen_fixtures(const std::filesystem::path& out_dir,
                                   const FixtureSpec& spec);

// Stream key for the permutation test of one (sentence, layer, metric)
// cell; fresh stream per cell derived from the master seed.
std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& sentence,
                        std::size_t layer, Metric metric);

}  // namespace xmrsa
