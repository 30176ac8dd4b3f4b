// Command-line front end: score, permtest, tnc, partition, windows, topo,
// synth, validate-manifest, gen-fixtures. Exit codes: 0 success, 1 total
// failure, 2 configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xmrsa/pipeline.hpp"
#include "xmrsa/version.hpp"

namespace {

using xmrsa::Metric;
using xmrsa::RunConfig;

struct GlobalArgs {
    std::string manifest;
    std::string out = "out";
    std::uint64_t seed = 0;
    std::size_t pca_k = 20;
    bool no_pca = false;
    std::size_t n_perm = 500;
    std::vector<std::string> metrics;
    std::string config_file;
    std::optional<std::size_t> layer;
    unsigned n_threads = 1;
    double tau_v = 0.45;
    std::vector<double> affect_weights = {0.55, -0.25, -0.20};
    std::size_t kmeans_k = 4;
    std::string permute_side = "model";
    std::vector<double> window_edges = {0, 250, 500, 750, 1000};
    std::vector<std::size_t> stats_windows = {3, 5, 9};
    std::vector<std::size_t> fft_windows = {8, 16, 32};
    std::vector<double> band_edges;  // empty -> built-in log-spaced default
    bool hann_taper = false;
};

void add_common(CLI::App* cmd, GlobalArgs& g, bool needs_manifest) {
    auto* m = cmd->add_option("--manifest", g.manifest, "manifest JSON path");
    if (needs_manifest) m->required();
    cmd->add_option("--out", g.out, "output directory");
    cmd->add_option("--seed", g.seed, "master seed");
    cmd->add_option("--pca-k", g.pca_k, "PCA components (default 20)");
    cmd->add_flag("--no-pca", g.no_pca, "disable PCA reduction");
    cmd->add_option("--n-perm", g.n_perm, "permutations (default 500)");
    cmd->add_option("--metrics", g.metrics,
                    "metric subset (default: all eight)");
    cmd->add_option("--config", g.config_file,
                    "JSON config file; overrides flags");
    cmd->add_option("--layer", g.layer, "analysis layer (default: last)");
    cmd->add_option("--threads", g.n_threads, "worker threads");
    cmd->add_option("--tau-v", g.tau_v, "valence threshold (default 0.45)");
    cmd->add_option("--affect-weights", g.affect_weights,
                    "three valence proxy weights")
        ->expected(3);
    cmd->add_option("--kmeans-k", g.kmeans_k, "prosody clusters (default 4)");
    cmd->add_option("--permute-side", g.permute_side,
                    "which side the permutation test shuffles: model|eeg")
        ->check(CLI::IsMember({"model", "eeg"}));
    cmd->add_option("--window-edges", g.window_edges,
                    "ms edges of consecutive analysis windows");
    cmd->add_option("--stats-windows", g.stats_windows,
                    "odd sliding-window lengths for local statistics");
    cmd->add_option("--fft-windows", g.fft_windows,
                    "power-of-two window lengths for band energies");
    cmd->add_option("--band-edges", g.band_edges,
                    "band edges as fractions of the token-grid Nyquist");
    cmd->add_flag("--hann-taper", g.hann_taper,
                  "apply a Hann taper before the segment DFT");
}

// The config file takes precedence over flags, so a run can be pinned to a
// single reviewed document.
void apply_config_file(GlobalArgs& g) {
    if (g.config_file.empty()) return;
    std::ifstream in(g.config_file);
    if (!in) throw xmrsa::ConfigError("cannot open " + g.config_file);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw xmrsa::ConfigError(g.config_file + ": " + e.what());
    }
    if (j.contains("manifest")) g.manifest = j["manifest"].get<std::string>();
    if (j.contains("out")) g.out = j["out"].get<std::string>();
    if (j.contains("seed")) g.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("pca_k")) g.pca_k = j["pca_k"].get<std::size_t>();
    if (j.contains("no_pca")) g.no_pca = j["no_pca"].get<bool>();
    if (j.contains("n_perm")) g.n_perm = j["n_perm"].get<std::size_t>();
    if (j.contains("metrics"))
        g.metrics = j["metrics"].get<std::vector<std::string>>();
    if (j.contains("layer")) g.layer = j["layer"].get<std::size_t>();
    if (j.contains("threads")) g.n_threads = j["threads"].get<unsigned>();
    if (j.contains("tau_v")) g.tau_v = j["tau_v"].get<double>();
    if (j.contains("affect_weights"))
        g.affect_weights = j["affect_weights"].get<std::vector<double>>();
    if (j.contains("kmeans_k")) g.kmeans_k = j["kmeans_k"].get<std::size_t>();
    if (j.contains("permute_side"))
        g.permute_side = j["permute_side"].get<std::string>();
    if (j.contains("window_edges"))
        g.window_edges = j["window_edges"].get<std::vector<double>>();
    if (j.contains("stats_windows"))
        g.stats_windows = j["stats_windows"].get<std::vector<std::size_t>>();
    if (j.contains("fft_windows"))
        g.fft_windows = j["fft_windows"].get<std::vector<std::size_t>>();
    if (j.contains("band_edges"))
        g.band_edges = j["band_edges"].get<std::vector<double>>();
    if (j.contains("hann_taper")) g.hann_taper = j["hann_taper"].get<bool>();
}

RunConfig to_run_config(GlobalArgs& g) {
    apply_config_file(g);
    RunConfig cfg;
    cfg.manifest_path = g.manifest;
    cfg.out_dir = g.out;
    cfg.seed = g.seed;
    cfg.pca_k = g.pca_k;
    cfg.pca_enabled = !g.no_pca;
    cfg.n_perm = g.n_perm;
    cfg.layer = g.layer;
    cfg.n_threads = g.n_threads;
    cfg.tau_v = g.tau_v;
    if (g.affect_weights.size() != 3)
        throw xmrsa::ConfigError("--affect-weights needs exactly 3 values");
    cfg.affect_weights = {g.affect_weights[0], g.affect_weights[1],
                          g.affect_weights[2]};
    cfg.kmeans_k = g.kmeans_k;
    cfg.permute_model_side = g.permute_side == "model";
    if (!g.metrics.empty()) {
        cfg.metrics.clear();
        for (const auto& name : g.metrics) {
            const auto m = xmrsa::metric_from_name(name);
            if (!m) throw xmrsa::ConfigError("unknown metric '" + name + "'");
            cfg.metrics.push_back(*m);
        }
    }
    if (g.window_edges.size() < 2)
        throw xmrsa::ConfigError("--window-edges needs at least 2 values");
    cfg.windows_ms.clear();
    for (std::size_t i = 0; i + 1 < g.window_edges.size(); ++i)
        cfg.windows_ms.emplace_back(g.window_edges[i], g.window_edges[i + 1]);
    cfg.features.stats_windows = g.stats_windows;
    cfg.features.fft_windows = g.fft_windows;
    if (!g.band_edges.empty()) {
        if (g.band_edges.size() < 2)
            throw xmrsa::ConfigError("--band-edges needs at least 2 values");
        cfg.features.bands.bands.clear();
        for (std::size_t i = 0; i + 1 < g.band_edges.size(); ++i)
            cfg.features.bands.bands.emplace_back(g.band_edges[i],
                                                  g.band_edges[i + 1]);
    }
    cfg.features.hann_taper = g.hann_taper;
    try {
        cfg.features.validate();
    } catch (const xmrsa::Error& e) {
        throw xmrsa::ConfigError(e.what());
    }
    if (cfg.n_perm < 1) throw xmrsa::ConfigError("--n-perm must be >= 1");
    if (cfg.pca_k < 1) throw xmrsa::ConfigError("--pca-k must be >= 1");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-modal representational similarity toolkit"};
    app.set_version_flag("--version", std::string("xmrsa ") + xmrsa::kVersion);
    app.require_subcommand(1);

    GlobalArgs g_score, g_perm, g_tnc, g_part, g_win, g_topo, g_synth;

    auto* score = app.add_subcommand("score",
                                     "per (sentence, layer, metric) scores, "
                                     "permutation p-values and best layers");
    bool export_rdms = false;
    add_common(score, g_score, true);
    score->add_flag("--export-rdms", export_rdms,
                    "also write per-sentence EEG/model RDM matrix files");

    auto* permtest =
        app.add_subcommand("permtest", "permutation test on two matrix files");
    std::string perm_x, perm_y, perm_metric = "spearman_rsa";
    add_common(permtest, g_perm, false);
    permtest->add_option("x", perm_x, "matrix file (kept fixed)")->required();
    permtest->add_option("y", perm_y, "matrix file (rows permuted)")->required();
    permtest->add_option("--metric", perm_metric, "metric name");

    auto* tnc = app.add_subcommand(
        "tnc", "tri-modal neighborhood consistency per sentence");
    add_common(tnc, g_tnc, true);

    auto* partition = app.add_subcommand(
        "partition", "affect and prosody partitions with group summaries");
    std::string part_scores, part_tnc;
    add_common(partition, g_part, true);
    partition->add_option("--scores", part_scores,
                          "scores.csv from a prior `score` run");
    partition->add_option("--tnc", part_tnc, "tnc.csv from a prior `tnc` run");

    auto* windows =
        app.add_subcommand("windows", "window-restricted Spearman RSA");
    bool per_electrode = false;
    add_common(windows, g_win, true);
    windows->add_flag("--per-electrode", per_electrode,
                      "also export electrode-wise RSA per window");

    auto* topo = app.add_subcommand(
        "topo", "electrode x layer similarity grid and SVG heatmap");
    bool no_svg = false;
    add_common(topo, g_topo, true);
    topo->add_flag("--no-svg", no_svg, "skip the SVG heatmap");

    auto* synth = app.add_subcommand(
        "synth", "Monte-Carlo validation of the additive noise model");
    xmrsa::SynthConfig synth_cfg;
    add_common(synth, g_synth, false);
    synth->add_option("--m", synth_cfg.m, "vector length per draw");
    synth->add_option("--n-seeds", synth_cfg.n_seeds, "seeds per cell");
    synth->add_option("--sigma-grid", synth_cfg.sigma_grid,
                      "attenuation sigma grid");
    synth->add_option("--sigma-q-grid", synth_cfg.sigma_q_grid,
                      "confound sweep grid");

    auto* validate = app.add_subcommand("validate-manifest",
                                        "parse and eagerly check a manifest");
    std::string validate_path;
    validate->add_option("manifest", validate_path, "manifest JSON path")
        ->required();

    auto* gen = app.add_subcommand("gen-fixtures",
                                   "write a synthetic dataset and manifest");
    xmrsa::FixtureSpec fixture;
    std::string gen_out = "fixtures";
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--sentences", fixture.n_sentences, "sentence count");
    gen->add_option("--layers", fixture.n_layers, "layer count");
    gen->add_option("--signal-layer", fixture.signal_layer,
                    "layer equal to the EEG epoch");
    gen->add_option("--tokens", fixture.t_a, "token count of first sentence");
    gen->add_option("--dims", fixture.dims, "model dims == EEG channels");
    gen->add_option("--seed", fixture.seed, "fixture seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) {
            auto cfg = to_run_config(g_score);
            cfg.export_rdms = export_rdms;
            return xmrsa::run_score(cfg);
        }
        if (permtest->parsed()) {
            const auto m = xmrsa::metric_from_name(perm_metric);
            if (!m)
                throw xmrsa::ConfigError("unknown metric '" + perm_metric + "'");
            return xmrsa::run_permtest(perm_x, perm_y, *m,
                                       to_run_config(g_perm));
        }
        if (tnc->parsed()) return xmrsa::run_tnc(to_run_config(g_tnc));
        if (partition->parsed()) {
            std::optional<std::filesystem::path> scores_csv, tnc_csv;
            if (!part_scores.empty()) scores_csv = part_scores;
            if (!part_tnc.empty()) tnc_csv = part_tnc;
            return xmrsa::run_partition(to_run_config(g_part), scores_csv,
                                        tnc_csv);
        }
        if (windows->parsed()) {
            auto cfg = to_run_config(g_win);
            cfg.per_electrode_windows = per_electrode;
            return xmrsa::run_windows(cfg);
        }
        if (topo->parsed())
            return xmrsa::run_topo(to_run_config(g_topo), !no_svg);
        if (synth->parsed())
            return xmrsa::run_synth(to_run_config(g_synth), synth_cfg);
        if (validate->parsed())
            return xmrsa::validate_manifest_cmd(validate_path);
        if (gen->parsed()) {
            const auto path = xmrsa::gen_fixtures(gen_out, fixture);
            std::cout << path.string() << "\n";
            return 0;
        }
    } catch (const xmrsa::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const xmrsa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
