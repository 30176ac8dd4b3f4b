#include "xmrsa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "xmrsa/matio.hpp"
#include "xmrsa/parallel.hpp"
#include "xmrsa/partition.hpp"
#include "xmrsa/preprocess.hpp"
#include "xmrsa/rdm.hpp"
#include "xmrsa/rng.hpp"
#include "xmrsa/significance.hpp"
#include "xmrsa/synth.hpp"
#include "xmrsa/tnc.hpp"
#include "xmrsa/version.hpp"

namespace xmrsa {

namespace {

using nlohmann::json;

// 17 significant digits so cross-language diffs are meaningful.
std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    return out;
}

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["manifest"] = cfg.manifest_path.string();
    j["out_dir"] = cfg.out_dir.string();
    j["seed"] = cfg.seed;
    j["pca_k"] = cfg.pca_k;
    j["pca_enabled"] = cfg.pca_enabled;
    std::vector<std::string> names;
    for (Metric m : cfg.metrics) names.emplace_back(metric_name(m));
    j["metrics"] = names;
    j["n_perm"] = cfg.n_perm;
    j["perm_batch"] = cfg.perm_batch;
    j["permute_model_side"] = cfg.permute_model_side;
    j["windows_ms"] = cfg.windows_ms;
    j["stats_windows"] = cfg.features.stats_windows;
    j["fft_windows"] = cfg.features.fft_windows;
    j["bands"] = cfg.features.bands.bands;
    j["hann_taper"] = cfg.features.hann_taper;
    j["tau_v"] = cfg.tau_v;
    j["affect_weights"] = cfg.affect_weights;
    j["kmeans_k"] = cfg.kmeans_k;
    if (cfg.layer) j["layer"] = *cfg.layer;
    j["export_rdms"] = cfg.export_rdms;
    j["per_electrode_windows"] = cfg.per_electrode_windows;
    j["n_threads"] = cfg.n_threads;
    return j;
}

void write_meta(const std::filesystem::path& out_dir, const RunConfig& cfg,
                const std::string& command, const Warnings& warnings,
                const std::string& started) {
    json j;
    j["tool"] = "xmrsa";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["warnings"] = warnings.messages;
    j["started_at"] = started;
    j["finished_at"] = iso_now();
    auto out = open_out(out_dir / "run_meta.json");
    out << j.dump(2) << "\n";
}

// Minimal CSV reader for our own artifacts (fields never contain commas).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("csv column '" + name + "' not found");
    }
};

CsvTable read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw MissingFile(p.string());
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

std::size_t analysis_layer(const RunConfig& cfg, std::size_t n_layers) {
    const std::size_t l = cfg.layer.value_or(n_layers - 1);
    if (l >= n_layers)
        throw ConfigError("layer " + std::to_string(l) + " out of range; have " +
                          std::to_string(n_layers) + " layers");
    return l;
}

std::vector<SentenceData> prepare_all(const Manifest& manifest,
                                      const RunConfig& cfg, Warnings* warnings,
                                      std::vector<std::string>* skipped) {
    std::vector<SentenceData> out;
    for (const auto& rec : manifest.sentences) {
        try {
            out.push_back(prepare_sentence(rec, cfg, warnings));
        } catch (const Error& e) {
            std::cerr << "skipping sentence " << rec.id << ": " << e.what()
                      << "\n";
            warn(warnings,
                 "sentence " + rec.id + " skipped: " + std::string(e.what()));
            if (skipped) skipped->push_back(rec.id);
        }
    }
    return out;
}

// Diverging blue-white-red map over [lo, hi]; NaN cells are grey.
std::string heat_color(double v, double lo, double hi) {
    if (!std::isfinite(v)) return "#808080";
    double u = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    u = std::clamp(u, 0.0, 1.0);
    const int stops[3][3] = {{33, 102, 172}, {247, 247, 247}, {178, 24, 43}};
    const double t = u < 0.5 ? u * 2.0 : (u - 0.5) * 2.0;
    const int* a = stops[u < 0.5 ? 0 : 1];
    const int* b = stops[u < 0.5 ? 1 : 2];
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(a[0] + t * (b[0] - a[0])),
                  static_cast<int>(a[1] + t * (b[1] - a[1])),
                  static_cast<int>(a[2] + t * (b[2] - a[2])));
    return buf;
}

void write_heatmap_svg(const std::filesystem::path& path, const Mat& grid,
                       const std::vector<std::string>& row_labels,
                       double lo, double hi) {
    constexpr int cell = 16, left = 70, top = 20;
    const int width = left + static_cast<int>(grid.cols) * cell + 10;
    const int height = top + static_cast<int>(grid.rows) * cell + 10;
    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    for (std::size_t i = 0; i < grid.rows; ++i) {
        out << "<text x=\"2\" y=\"" << top + (i + 1) * cell - 4
            << "\" font-size=\"10\" font-family=\"monospace\">"
            << (i < row_labels.size() ? row_labels[i] : std::to_string(i))
            << "</text>\n";
        for (std::size_t j = 0; j < grid.cols; ++j) {
            out << "<rect x=\"" << left + j * cell << "\" y=\"" << top + i * cell
                << "\" width=\"" << cell << "\" height=\"" << cell
                << "\" fill=\"" << heat_color(grid.at(i, j), lo, hi)
                << "\"><title>" << fmt(grid.at(i, j)) << "</title></rect>\n";
        }
    }
    for (std::size_t j = 0; j < grid.cols; ++j)
        out << "<text x=\"" << left + j * cell + 3 << "\" y=\"" << top - 6
            << "\" font-size=\"9\" font-family=\"monospace\">" << j
            << "</text>\n";
    out << "</svg>\n";
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& sentence,
                        std::size_t layer, Metric metric) {
    return CounterRng::stream_key(
        master_seed,
        {fnv1a(sentence), layer, static_cast<std::uint64_t>(metric)});
}

SentenceData prepare_sentence(const SentenceRecord& rec, const RunConfig& cfg,
                              Warnings* warnings) {
    SentenceData data;
    data.id = rec.id;
    data.duration_ms = rec.duration_ms;

    Mat eeg_raw = load_matrix(rec.eeg_path);
    if (eeg_raw.cols != rec.channels.size())
        throw ParseError("sentence " + rec.id + ": EEG has " +
                         std::to_string(eeg_raw.cols) + " columns but " +
                         std::to_string(rec.channels.size()) +
                         " channel names");

    std::vector<Mat> layers;
    layers.reserve(rec.layers.size());
    for (const auto& lp : rec.layers) layers.push_back(load_matrix(lp));
    const std::size_t t_a = layers.front().rows;
    for (std::size_t l = 1; l < layers.size(); ++l)
        if (layers[l].rows != t_a)
            throw ShapeMismatch(rec.layers[l].string(), t_a, layers[l].rows);
    data.t_a = t_a;

    // Drop constant electrodes rather than failing the sentence.
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < eeg_raw.cols; ++j) {
        const auto col = eeg_raw.col(j);
        const double first = col.front();
        const bool constant =
            std::all_of(col.begin(), col.end(),
                        [&](double v) { return v == first; });
        if (constant)
            warn(warnings, "sentence " + rec.id + ": dropping constant electrode " +
                               rec.channels[j]);
        else
            keep.push_back(j);
    }
    if (keep.size() < 2)
        throw ZeroVariance("sentence " + rec.id +
                           ": fewer than 2 non-constant electrodes");
    Mat eeg_kept(eeg_raw.rows, keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        data.channels.push_back(rec.channels[keep[j]]);
        for (std::size_t i = 0; i < eeg_raw.rows; ++i)
            eeg_kept.at(i, j) = eeg_raw.at(i, keep[j]);
    }

    data.eeg_aligned = resample_to(zscore_columns(eeg_kept), t_a);

    auto reduce = [&](const Mat& m) -> Mat {
        if (!cfg.pca_enabled) return m;
        const std::size_t k_max = std::min(m.rows - 1, m.cols);
        const std::size_t k = std::min(cfg.pca_k, k_max);
        if (k < cfg.pca_k)
            warn(warnings, "sentence " + rec.id + ": pca k clamped to " +
                               std::to_string(k));
        return pca_fit_transform(m, k, warnings).second;
    };

    data.eeg_reduced = reduce(data.eeg_aligned);
    for (const auto& lm : layers) data.layers_reduced.push_back(reduce(lm));

    if (rec.acoustic_path) {
        Mat ac = load_matrix(*rec.acoustic_path);
        if (ac.rows != t_a) ac = resample_to(ac, t_a);
        data.acoustic_reduced = reduce(ac);
    }
    return data;
}

int run_score(const RunConfig& cfg) {
    const std::string started = iso_now();
    Warnings warnings;
    const Manifest manifest = load_manifest(cfg.manifest_path);
    std::filesystem::create_directories(cfg.out_dir);

    if (cfg.layer) analysis_layer(cfg, manifest.layer_count());

    std::vector<std::string> skipped;
    const auto sentences = prepare_all(manifest, cfg, &warnings, &skipped);
    if (sentences.empty()) {
        write_meta(cfg.out_dir, cfg, "score", warnings, started);
        std::cerr << "all sentences failed\n";
        return 1;
    }
    const std::size_t n_layers = manifest.layer_count();
    const std::size_t n_metrics = cfg.metrics.size();

    struct Cell {
        PermResult perm;
        Warnings warnings;
    };
    std::vector<Cell> cells(sentences.size() * n_layers * n_metrics);
    const std::size_t tasks = sentences.size() * n_layers;
    parallel_for(tasks, cfg.n_threads, [&](std::size_t task) {
        const std::size_t si = task / n_layers;
        const std::size_t l = task % n_layers;
        const SentenceData& sd = sentences[si];
        for (std::size_t mi = 0; mi < n_metrics; ++mi) {
            const Metric metric = cfg.metrics[mi];
            Cell& cell = cells[(si * n_layers + l) * n_metrics + mi];
            PermTestOptions opts;
            opts.batch = cfg.perm_batch;
            const Mat& eeg = sd.eeg_reduced;
            const Mat& llm = sd.layers_reduced[l];
            const Mat& x = cfg.permute_model_side ? eeg : llm;
            const Mat& y = cfg.permute_model_side ? llm : eeg;
            cell.perm = perm_test(x, y, metric, cfg.n_perm,
                                  cell_seed(cfg.seed, sd.id, l, metric), opts,
                                  &cell.warnings);
        }
    });

    // canonical order: manifest sentence order, layer, metric
    auto out = open_out(cfg.out_dir / "scores.csv");
    out << "sentence,layer,metric,score,p_value,null_mean,null_sd,n_perm,n_ge,"
           "seed\n";
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        for (std::size_t l = 0; l < n_layers; ++l) {
            for (std::size_t mi = 0; mi < n_metrics; ++mi) {
                const Cell& cell = cells[(si * n_layers + l) * n_metrics + mi];
                for (const auto& w : cell.warnings.messages)
                    warnings.add(sentences[si].id + "/" + std::to_string(l) +
                                 "/" +
                                 std::string(metric_name(cfg.metrics[mi])) +
                                 ": " + w);
                out << sentences[si].id << "," << l << ","
                    << metric_name(cfg.metrics[mi]) << ","
                    << fmt(cell.perm.observed) << "," << fmt(cell.perm.p_value)
                    << "," << fmt(cell.perm.null_mean) << ","
                    << fmt(cell.perm.null_sd) << "," << cell.perm.n_perm << ","
                    << cell.perm.n_ge << "," << cell.perm.seed << "\n";
            }
        }
    }
    out.close();

    // Best layer on the sentence-averaged curve; ties go to the shallower
    // layer.
    auto best = open_out(cfg.out_dir / "best_layer.csv");
    best << "metric,best_layer,mean_score,n_sentences\n";
    for (std::size_t mi = 0; mi < n_metrics; ++mi) {
        std::size_t best_l = 0;
        double best_mean = -std::numeric_limits<double>::infinity();
        std::size_t best_n = 0;
        for (std::size_t l = 0; l < n_layers; ++l) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t si = 0; si < sentences.size(); ++si) {
                const double v =
                    cells[(si * n_layers + l) * n_metrics + mi].perm.observed;
                if (std::isfinite(v)) {
                    sum += v;
                    ++n;
                }
            }
            if (n == 0) continue;
            const double mean = sum / static_cast<double>(n);
            if (mean > best_mean) {
                best_mean = mean;
                best_l = l;
                best_n = n;
            }
        }
        best << metric_name(cfg.metrics[mi]) << "," << best_l << ","
             << fmt(best_mean) << "," << best_n << "\n";
    }
    best.close();

    if (cfg.export_rdms) {
        const std::size_t layer = analysis_layer(cfg, n_layers);
        const auto rdm_dir = cfg.out_dir / "rdms";
        std::filesystem::create_directories(rdm_dir);
        for (const auto& sd : sentences) {
            const Rdm eeg_rdm = build_rdm(sd.eeg_reduced, &warnings);
            write_matrix(rdm_dir / (sd.id + "_eeg.rsam"),
                         Mat(eeg_rdm.n, eeg_rdm.n, eeg_rdm.values));
            const Rdm llm_rdm = build_rdm(sd.layers_reduced[layer], &warnings);
            write_matrix(rdm_dir / (sd.id + "_layer" + std::to_string(layer) +
                                    ".rsam"),
                         Mat(llm_rdm.n, llm_rdm.n, llm_rdm.values));
        }
    }

    write_meta(cfg.out_dir, cfg, "score", warnings, started);
    return 0;
}

int run_tnc(const RunConfig& cfg) {
    const std::string started = iso_now();
    Warnings warnings;
    const Manifest manifest = load_manifest(cfg.manifest_path);
    std::filesystem::create_directories(cfg.out_dir);
    const std::size_t layer = analysis_layer(cfg, manifest.layer_count());

    const auto sentences = prepare_all(manifest, cfg, &warnings, nullptr);
    if (sentences.empty()) {
        write_meta(cfg.out_dir, cfg, "tnc", warnings, started);
        return 1;
    }

    std::vector<std::optional<TriModalResult>> results(sentences.size());
    std::vector<Warnings> task_warnings(sentences.size());
    parallel_for(sentences.size(), cfg.n_threads, [&](std::size_t si) {
        const SentenceData& sd = sentences[si];
        if (!sd.acoustic_reduced) return;
        TriModalResult r =
            tnc_sentence(*sd.acoustic_reduced, sd.eeg_reduced,
                         sd.layers_reduced[layer], &task_warnings[si]);
        r.sentence = sd.id;
        r.layer = layer;
        results[si] = r;
    });

    std::size_t n_no_acoustic = 0, n_incomplete = 0;
    auto out = open_out(cfg.out_dir / "tnc.csv");
    out << "sentence,layer,rho_ac_eeg,rho_eeg_llm,rho_ac_llm,tnc,complete\n";
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        for (const auto& w : task_warnings[si].messages)
            warnings.add(sentences[si].id + ": " + w);
        if (!results[si]) {
            ++n_no_acoustic;
            warnings.add("sentence " + sentences[si].id +
                         " has no acoustic table; tnc skipped");
            continue;
        }
        const TriModalResult& r = *results[si];
        if (!r.complete) ++n_incomplete;
        out << r.sentence << "," << r.layer << "," << fmt(r.rho_ac_eeg) << ","
            << fmt(r.rho_eeg_llm) << "," << fmt(r.rho_ac_llm) << ","
            << fmt(r.tnc) << "," << (r.complete ? 1 : 0) << "\n";
    }
    out.close();
    if (n_no_acoustic > 0)
        std::cerr << n_no_acoustic << " sentence(s) lacked acoustic tables\n";

    write_meta(cfg.out_dir, cfg, "tnc", warnings, started);
    return n_no_acoustic == sentences.size() ? 1 : 0;
}

namespace {

// Electrode-wise window RSA: features are enriched on the full aligned
// axis, then rows are restricted to each window's token indices.
void write_electrode_windows(const RunConfig& cfg,
                             const std::vector<SentenceData>& sentences,
                             std::size_t layer, Warnings& warnings) {
    auto out = open_out(cfg.out_dir / "windows_electrodes.csv");
    out << "sentence,layer,a_ms,b_ms,electrode,n_tokens,rsa,note\n";
    for (const auto& sd : sentences) {
        std::vector<std::optional<Mat>> enriched(sd.channels.size());
        for (std::size_t c = 0; c < sd.channels.size(); ++c) {
            try {
                enriched[c] =
                    enrich_electrode(sd.eeg_aligned.col(c), cfg.features)
                        .values;
            } catch (const Error& e) {
                warnings.add(sd.id + "/" + sd.channels[c] +
                             ": enrichment failed: " + std::string(e.what()));
            }
        }
        const Mat& llm = sd.layers_reduced[layer];
        for (const auto& [a, b] : cfg.windows_ms) {
            const TokenWindow w = token_window(sd.t_a, sd.duration_ms, a, b);
            std::optional<RdmVec> llm_vec;
            std::string window_note;
            if (w.indices.size() < 3) {
                window_note = "degenerate: fewer than 3 token samples";
            } else {
                try {
                    llm_vec = vec_upper(
                        build_rdm(llm.take_rows(w.indices), &warnings));
                } catch (const Error& e) {
                    window_note = e.what();
                }
            }
            for (std::size_t c = 0; c < sd.channels.size(); ++c) {
                out << sd.id << "," << layer << "," << fmt(a) << "," << fmt(b)
                    << "," << sd.channels[c] << "," << w.indices.size() << ",";
                if (!llm_vec || !enriched[c]) {
                    out << ","
                        << (window_note.empty() ? "electrode enrichment failed"
                                                : window_note)
                        << "\n";
                    continue;
                }
                try {
                    const RdmVec ev = vec_upper(
                        build_rdm(enriched[c]->take_rows(w.indices)));
                    out << fmt(spearman_rsa(ev, *llm_vec).value) << ",\n";
                } catch (const Error& e) {
                    out << "," << e.what() << "\n";
                }
            }
        }
    }
}

}  // namespace

int run_windows(const RunConfig& cfg) {
    const std::string started = iso_now();
    Warnings warnings;
    const Manifest manifest = load_manifest(cfg.manifest_path);
    std::filesystem::create_directories(cfg.out_dir);
    const std::size_t layer = analysis_layer(cfg, manifest.layer_count());

    const auto sentences = prepare_all(manifest, cfg, &warnings, nullptr);
    if (sentences.empty()) {
        write_meta(cfg.out_dir, cfg, "windows", warnings, started);
        return 1;
    }

    std::vector<std::vector<WindowRsaRow>> rows(sentences.size());
    std::vector<Warnings> task_warnings(sentences.size());
    parallel_for(sentences.size(), cfg.n_threads, [&](std::size_t si) {
        const SentenceData& sd = sentences[si];
        rows[si] = windowed_rsa(sd.eeg_reduced, sd.layers_reduced[layer],
                                sd.duration_ms, cfg.windows_ms,
                                &task_warnings[si]);
    });

    auto out = open_out(cfg.out_dir / "windows.csv");
    out << "sentence,layer,a_ms,b_ms,n_tokens,rsa,note\n";
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        for (const auto& w : task_warnings[si].messages)
            warnings.add(sentences[si].id + ": " + w);
        for (const auto& r : rows[si])
            out << sentences[si].id << "," << layer << "," << fmt(r.a_ms) << ","
                << fmt(r.b_ms) << "," << r.n_tokens << ","
                << (r.rsa ? fmt(*r.rsa) : "") << "," << r.note << "\n";
    }
    out.close();

    if (cfg.per_electrode_windows)
        write_electrode_windows(cfg, sentences, layer, warnings);

    write_meta(cfg.out_dir, cfg, "windows", warnings, started);
    return 0;
}

int run_topo(const RunConfig& cfg, bool write_svg) {
    const std::string started = iso_now();
    Warnings warnings;
    const Manifest manifest = load_manifest(cfg.manifest_path);
    std::filesystem::create_directories(cfg.out_dir);
    const std::size_t n_layers = manifest.layer_count();

    const auto sentences = prepare_all(manifest, cfg, &warnings, nullptr);
    if (sentences.empty()) {
        write_meta(cfg.out_dir, cfg, "topo", warnings, started);
        return 1;
    }

    std::vector<Mat> grids(sentences.size());
    std::vector<Warnings> task_warnings(sentences.size());
    parallel_for(sentences.size(), cfg.n_threads, [&](std::size_t si) {
        grids[si] =
            layer_electrode_grid(sentences[si].eeg_aligned,
                                 sentences[si].layers_reduced, cfg.features,
                                 &task_warnings[si]);
    });

    // channel name -> per-layer (sum, count), first-seen channel order
    std::vector<std::string> channel_order;
    std::map<std::string, std::vector<std::pair<double, std::size_t>>> acc;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        for (const auto& w : task_warnings[si].messages)
            warnings.add(sentences[si].id + ": " + w);
        const auto& chans = sentences[si].channels;
        for (std::size_t c = 0; c < chans.size(); ++c) {
            auto [it, inserted] = acc.try_emplace(
                chans[c],
                std::vector<std::pair<double, std::size_t>>(n_layers, {0.0, 0}));
            if (inserted) channel_order.push_back(chans[c]);
            for (std::size_t l = 0; l < n_layers; ++l) {
                const double v = grids[si].at(c, l);
                if (std::isfinite(v)) {
                    it->second[l].first += v;
                    it->second[l].second += 1;
                }
            }
        }
    }

    Mat mean_grid(channel_order.size(), n_layers,
                  std::numeric_limits<double>::quiet_NaN());
    auto out = open_out(cfg.out_dir / "topo.csv");
    out << "electrode,layer,mean_score,n_sentences\n";
    for (std::size_t c = 0; c < channel_order.size(); ++c) {
        const auto& per_layer = acc.at(channel_order[c]);
        for (std::size_t l = 0; l < n_layers; ++l) {
            const auto [sum, n] = per_layer[l];
            const double mean =
                n > 0 ? sum / static_cast<double>(n)
                      : std::numeric_limits<double>::quiet_NaN();
            mean_grid.at(c, l) = mean;
            out << channel_order[c] << "," << l << ","
                << (n > 0 ? fmt(mean) : "") << "," << n << "\n";
        }
    }
    out.close();

    if (write_svg)
        write_heatmap_svg(cfg.out_dir / "topo.svg", mean_grid, channel_order,
                          -1.0, 1.0);

    write_meta(cfg.out_dir, cfg, "topo", warnings, started);
    return 0;
}

int run_partition(const RunConfig& cfg,
                  const std::optional<std::filesystem::path>& scores_csv,
                  const std::optional<std::filesystem::path>& tnc_csv) {
    const std::string started = iso_now();
    Warnings warnings;
    const Manifest manifest = load_manifest(cfg.manifest_path);
    std::filesystem::create_directories(cfg.out_dir);

    // Affect partition (requires the 3 affect features on every sentence
    // once any sentence carries them).
    std::vector<std::pair<std::string, std::array<double, 3>>> affect_rows;
    std::vector<std::string> missing_affect;
    for (const auto& rec : manifest.sentences) {
        if (rec.affect_features)
            affect_rows.emplace_back(rec.id, *rec.affect_features);
        else
            missing_affect.push_back(rec.id);
    }
    std::map<std::string, std::string> affect_groups;
    if (!affect_rows.empty()) {
        if (!missing_affect.empty()) {
            std::cerr << "sentences missing affect features:";
            for (const auto& id : missing_affect) std::cerr << " " << id;
            std::cerr << "\n";
            return 1;
        }
        const auto labels =
            affect_partition(affect_rows, cfg.tau_v, cfg.affect_weights);
        auto out = open_out(cfg.out_dir / "affect.csv");
        out << "sentence,valence,label\n";
        for (const auto& rec : manifest.sentences) {
            const auto& lab = labels.at(rec.id);
            out << rec.id << "," << fmt(lab.valence) << ","
                << affect_group_name(lab.group) << "\n";
            affect_groups[rec.id] =
                "affect:" + std::string(affect_group_name(lab.group));
        }
    } else {
        warnings.add("no affect features in manifest; affect partition skipped");
    }

    // Prosody partition over the 13-D descriptors.
    std::vector<std::pair<std::string, std::vector<double>>> prosody_rows;
    std::vector<std::string> missing_prosody;
    for (const auto& rec : manifest.sentences) {
        if (rec.prosody_row)
            prosody_rows.emplace_back(rec.id, *rec.prosody_row);
        else
            missing_prosody.push_back(rec.id);
    }
    std::map<std::string, std::string> prosody_groups;
    {
        if (!missing_prosody.empty()) {
            std::cerr << "sentences missing prosody rows:";
            for (const auto& id : missing_prosody) std::cerr << " " << id;
            std::cerr << "\n";
            return 1;
        }
        if (prosody_rows.size() < cfg.kmeans_k) {
            std::cerr << "need at least K=" << cfg.kmeans_k
                      << " sentences for prosody clustering\n";
            return 1;
        }
        const auto clusters =
            prosody_partition(prosody_rows, cfg.kmeans_k, cfg.seed, &warnings);
        auto cl = open_out(cfg.out_dir / "clusters.csv");
        cl << "sentence,cluster\n";
        std::map<std::string, std::size_t> by_id;
        for (const auto& c : clusters)
            for (const auto& id : c.members) by_id[id] = c.cluster_id;
        for (const auto& rec : manifest.sentences) {
            cl << rec.id << "," << by_id.at(rec.id) << "\n";
            prosody_groups[rec.id] =
                "prosody:" + std::to_string(by_id.at(rec.id));
        }
        auto ce = open_out(cfg.out_dir / "centroids.csv");
        ce << "cluster,n_members,dim,value\n";
        for (const auto& c : clusters)
            for (std::size_t d = 0; d < c.centroid.size(); ++d)
                ce << c.cluster_id << "," << c.members.size() << "," << d << ","
                   << fmt(c.centroid[d]) << "\n";
    }

    // Optional aggregation of upstream per-sentence scores and TNC.
    std::vector<std::tuple<std::string, std::string, double>> scores;
    if (scores_csv) {
        const CsvTable t = read_csv(*scores_csv);
        const std::size_t c_sent = t.col("sentence"), c_layer = t.col("layer"),
                          c_metric = t.col("metric"), c_score = t.col("score");
        const std::size_t layer = analysis_layer(cfg, manifest.layer_count());
        for (const auto& r : t.rows) {
            if (std::stoul(r[c_layer]) != layer) continue;
            scores.emplace_back(r[c_sent], r[c_metric], std::stod(r[c_score]));
        }
    }
    if (tnc_csv) {
        const CsvTable t = read_csv(*tnc_csv);
        const std::size_t c_sent = t.col("sentence"), c_tnc = t.col("tnc"),
                          c_complete = t.col("complete");
        for (const auto& r : t.rows) {
            const double v = r[c_complete] == "1"
                                 ? std::stod(r[c_tnc])
                                 : std::numeric_limits<double>::quiet_NaN();
            scores.emplace_back(r[c_sent], "tnc", v);
        }
    }
    if (!scores.empty()) {
        std::vector<GroupStat> stats;
        if (!affect_groups.empty()) {
            auto s = group_summary(affect_groups, scores);
            stats.insert(stats.end(), s.begin(), s.end());
        }
        if (!prosody_groups.empty()) {
            auto s = group_summary(prosody_groups, scores);
            stats.insert(stats.end(), s.begin(), s.end());
        }
        auto out = open_out(cfg.out_dir / "group_summary.csv");
        out << "group,metric,mean,sd,n,n_excluded\n";
        for (const auto& st : stats)
            out << st.group << "," << st.metric << ","
                << (st.mean ? fmt(*st.mean) : "") << ","
                << (st.sd ? fmt(*st.sd) : "") << "," << st.n << ","
                << st.n_excluded << "\n";
    }

    write_meta(cfg.out_dir, cfg, "partition", warnings, started);
    return 0;
}

int run_synth(const RunConfig& cfg, const SynthConfig& synth) {
    const std::string started = iso_now();
    Warnings warnings;
    std::filesystem::create_directories(cfg.out_dir);

    const auto atten = attenuation_sweep(synth.sigma_grid, synth.m,
                                         synth.n_seeds, cfg.seed,
                                         cfg.n_threads);
    auto out = open_out(cfg.out_dir / "synth_attenuation.csv");
    out << "sigma_z,sigma_m,sigma_n,sigma_q,pair,expected,observed_mean,"
           "observed_se,n_seeds\n";
    for (const auto& c : atten)
        out << fmt(c.sigma_z) << "," << fmt(c.sigma_m) << "," << fmt(c.sigma_n)
            << ",0,shared_z," << fmt(c.expected) << "," << fmt(c.observed_mean)
            << "," << fmt(c.observed_se) << "," << c.n_seeds << "\n";
    out.close();

    NoiseModelCfg base;
    base.m = synth.m;
    base.sigma_z = synth.dilution_sigma_z;
    base.sigma_ac = base.sigma_eeg = base.sigma_llm = 1.0;
    base.seed = cfg.seed;
    const auto dil = dilution_experiment(base, synth.sigma_q_grid,
                                         synth.n_seeds, cfg.n_threads);
    auto out2 = open_out(cfg.out_dir / "synth_dilution.csv");
    out2 << "sigma_z,sigma_m,sigma_n,sigma_q,pair,expected,observed_mean,"
            "observed_se,n_seeds\n";
    for (const auto& row : dil) {
        const double sz = base.sigma_z, sq = row.sigma_q;
        const double e_ae = unconfounded_pair_expected(sz, sq, base.sigma_ac,
                                                       base.sigma_eeg);
        const double e_el = unconfounded_pair_expected(sz, sq, base.sigma_llm,
                                                       base.sigma_eeg);
        const double e_al =
            confounded_pair_expected(sz, sq, base.sigma_ac, base.sigma_llm);
        const double e_tnc = (e_ae * e_ae + e_el * e_el + e_al * e_al) / 3.0;
        auto emit = [&](const char* pair, double expected, double mean,
                        double se) {
            out2 << fmt(sz) << ",1,1," << fmt(sq) << "," << pair << ","
                 << fmt(expected) << "," << fmt(mean) << "," << fmt(se) << ","
                 << synth.n_seeds << "\n";
        };
        emit("ac_eeg", e_ae, row.mean_ac_eeg, row.se_ac_eeg);
        emit("eeg_llm", e_el, row.mean_eeg_llm, row.se_eeg_llm);
        emit("ac_llm", e_al, row.mean_ac_llm, row.se_ac_llm);
        emit("tnc", e_tnc, row.mean_tnc, row.se_tnc);
    }
    out2.close();

    write_meta(cfg.out_dir, cfg, "synth", warnings, started);
    return 0;
}

int run_permtest(const std::filesystem::path& x_path,
                 const std::filesystem::path& y_path, Metric metric,
                 const RunConfig& cfg) {
    Warnings warnings;
    const Mat x = load_matrix(x_path);
    const Mat y = load_matrix(y_path);
    PermTestOptions opts;
    opts.batch = cfg.perm_batch;
    opts.n_threads = cfg.n_threads;
    const PermResult r =
        perm_test(x, y, metric, cfg.n_perm, cfg.seed, opts, &warnings);
    std::cout << "metric=" << metric_name(metric) << "\n"
              << "observed=" << fmt(r.observed) << "\n"
              << "p_value=" << fmt(r.p_value) << "\n"
              << "null_mean=" << fmt(r.null_mean) << "\n"
              << "null_sd=" << fmt(r.null_sd) << "\n"
              << "n_perm=" << r.n_perm << "\n"
              << "n_ge=" << r.n_ge << "\n"
              << "seed=" << r.seed << "\n";
    for (const auto& w : warnings.messages)
        std::cerr << "warning: " << w << "\n";
    return 0;
}

int validate_manifest_cmd(const std::filesystem::path& manifest_path) {
    const Manifest m = load_manifest(manifest_path);
    std::cout << "dataset_id=" << m.dataset_id << "\n";
    if (m.subject_id) std::cout << "subject_id=" << *m.subject_id << "\n";
    std::cout << "sentences=" << m.sentences.size() << "\n"
              << "layers=" << m.layer_count() << "\n";
    double total_ms = 0.0;
    std::size_t with_acoustic = 0, with_prosody = 0, with_affect = 0;
    for (const auto& rec : m.sentences) {
        total_ms += rec.duration_ms;
        if (rec.acoustic_path) ++with_acoustic;
        if (rec.prosody_row) ++with_prosody;
        if (rec.affect_features) ++with_affect;
    }
    std::cout << "total_duration_ms=" << fmt(total_ms) << "\n"
              << "with_acoustic=" << with_acoustic << "\n"
              << "with_prosody=" << with_prosody << "\n"
              << "with_affect=" << with_affect << "\n"
              << "ok\n";
    return 0;
}

std::filesystem::path gen_fixtures(const std::filesystem::path& out_dir,
                                   const FixtureSpec& spec) {
    std::filesystem::create_directories(out_dir);
    if (spec.signal_layer >= spec.n_layers)
        throw ConfigError("signal_layer out of range");

    auto gaussian_mat = [&](std::size_t rows, std::size_t cols,
                            std::uint64_t s0, std::uint64_t s1) {
        CounterRng rng(spec.seed, {s0, s1});
        Mat m(rows, cols);
        for (double& v : m.data) v = rng.next_gaussian();
        return m;
    };

    Manifest manifest;
    manifest.dataset_id = "fixture";
    manifest.subject_id = "synthetic";
    for (std::size_t s = 0; s < spec.n_sentences; ++s) {
        char id[16];
        std::snprintf(id, sizeof(id), "s%03zu", s);
        const std::size_t t_a = spec.t_a + 4 * s;

        SentenceRecord rec;
        rec.id = id;
        rec.duration_ms = 1200.0 + 150.0 * static_cast<double>(s);

        // Pre-standardized columns keep the EEG branch (z-score, then PCA)
        // and the model branch (PCA only) on the same basis, so all eight
        // metrics see the constructed layer as near-identical.
        const Mat signal = zscore_columns(gaussian_mat(t_a, spec.dims, s, 1000));
        for (std::size_t l = 0; l < spec.n_layers; ++l) {
            const auto p = out_dir / (std::string(id) + "_layer" +
                                      std::to_string(l) + ".rsam");
            if (l == spec.signal_layer)
                write_matrix(p, signal);
            else
                write_matrix(p, gaussian_mat(t_a, spec.dims, s, l));
            rec.layers.push_back(p);
        }

        // EEG epoch equals the signal layer's hidden states.
        rec.eeg_path = out_dir / (std::string(id) + "_eeg.rsam");
        write_matrix(rec.eeg_path, signal);
        for (std::size_t c = 0; c < spec.dims; ++c) {
            char ch[8];
            std::snprintf(ch, sizeof(ch), "ch%02zu", c);
            rec.channels.emplace_back(ch);
        }

        // Acoustic table on its own (finer) grid to exercise resampling.
        rec.acoustic_path = out_dir / (std::string(id) + "_ac.rsam");
        write_matrix(*rec.acoustic_path, gaussian_mat(t_a + 17, 13, s, 2000));

        CounterRng aux(spec.seed, {s, 3000});
        std::vector<double> prosody(13);
        for (double& v : prosody) v = aux.next_gaussian();
        rec.prosody_row = prosody;
        rec.affect_features = {aux.next_gaussian(), aux.next_gaussian(),
                               aux.next_gaussian()};

        manifest.sentences.push_back(std::move(rec));
    }

    const auto manifest_path = out_dir / "manifest.json";
    write_manifest(manifest_path, manifest);
    return manifest_path;
}

}  // namespace xmrsa
