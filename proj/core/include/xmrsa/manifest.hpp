#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmrsa/errors.hpp"

namespace xmrsa {

// Per-sentence metadata. All paths are stored resolved against the
// manifest's directory.
struct SentenceRecord {
    std::string id;
    double duration_ms = 0.0;
    std::filesystem::path eeg_path;
    std::vector<std::string> channels;            // electrode names, size C
    std::vector<std::filesystem::path> layers;    // index = layer l, 0-based
    std::optional<std::filesystem::path> acoustic_path;
    std::optional<std::vector<double>> prosody_row;       // 13 descriptors
    std::optional<std::array<double, 3>> affect_features; // pitch, alpha, hammarberg

    std::size_t layer_count() const { return layers.size(); }
};

struct Manifest {
    std::string dataset_id;
    std::optional<std::string> subject_id;
    std::vector<SentenceRecord> sentences;

    std::size_t layer_count() const {
        return sentences.empty() ? 0 : sentences.front().layer_count();
    }
};

// Parses and validates a JSON manifest (schema in docs/formats.md):
// unique sentence ids, identical layer count L across sentences, positive
// durations, 13-entry prosody rows, and eager existence checks on every
// referenced file.
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace xmrsa
