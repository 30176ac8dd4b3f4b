#include "xmrsa/manifest.hpp"

#include <fstream>
#include <unordered_map>

#include <json.hpp>

namespace xmrsa {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& rel) {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p : base / p;
}

void require_exists(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) throw MissingFile(p.string());
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path.string());

    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    const auto base = path.parent_path();
    Manifest m;
    try {
        m.dataset_id = doc.at("dataset_id").get<std::string>();
        if (doc.contains("subject_id"))
            m.subject_id = doc.at("subject_id").get<std::string>();

        std::unordered_map<std::string, std::size_t> seen;
        std::size_t pos = 0;
        for (const auto& js : doc.at("sentences")) {
            SentenceRecord rec;
            rec.id = js.at("id").get<std::string>();
            if (auto it = seen.find(rec.id); it != seen.end())
                throw ParseError(path.string() + ": duplicate sentence id '" +
                                 rec.id + "' at positions " +
                                 std::to_string(it->second) + " and " +
                                 std::to_string(pos));
            seen.emplace(rec.id, pos);

            rec.duration_ms = js.at("duration_ms").get<double>();
            if (!(rec.duration_ms > 0.0))
                throw ParseError(path.string() + ": sentence '" + rec.id +
                                 "' has non-positive duration_ms");

            const auto& eeg = js.at("eeg");
            rec.eeg_path = resolve(base, eeg.at("path").get<std::string>());
            rec.channels = eeg.at("channels").get<std::vector<std::string>>();
            if (rec.channels.empty())
                throw ParseError(path.string() + ": sentence '" + rec.id +
                                 "' declares no channels");

            for (const auto& lp : js.at("layers"))
                rec.layers.push_back(resolve(base, lp.get<std::string>()));
            if (rec.layers.empty())
                throw ParseError(path.string() + ": sentence '" + rec.id +
                                 "' declares no layers");

            if (js.contains("acoustic") && !js.at("acoustic").is_null())
                rec.acoustic_path =
                    resolve(base, js.at("acoustic").get<std::string>());
            if (js.contains("prosody_row") && !js.at("prosody_row").is_null()) {
                rec.prosody_row = js.at("prosody_row").get<std::vector<double>>();
                if (rec.prosody_row->size() != 13)
                    throw ParseError(path.string() + ": sentence '" + rec.id +
                                     "' prosody_row must have 13 entries, got " +
                                     std::to_string(rec.prosody_row->size()));
            }
            if (js.contains("affect_features") &&
                !js.at("affect_features").is_null()) {
                auto v = js.at("affect_features").get<std::vector<double>>();
                if (v.size() != 3)
                    throw ParseError(path.string() + ": sentence '" + rec.id +
                                     "' affect_features must have 3 entries");
                rec.affect_features = {v[0], v[1], v[2]};
            }

            m.sentences.push_back(std::move(rec));
            ++pos;
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    if (m.sentences.empty())
        throw ParseError(path.string() + ": manifest has no sentences");

    const std::size_t L = m.sentences.front().layer_count();
    for (const auto& rec : m.sentences) {
        if (rec.layer_count() != L)
            throw InconsistentLayers(rec.id, rec.layer_count(), L);
        require_exists(rec.eeg_path);
        for (const auto& lp : rec.layers) require_exists(lp);
        if (rec.acoustic_path) require_exists(*rec.acoustic_path);
    }
    return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    const auto base = path.parent_path();
    auto relativize = [&](const std::filesystem::path& p) {
        auto rel = std::filesystem::relative(p, base);
        return rel.empty() ? p.string() : rel.string();
    };

    json doc;
    doc["dataset_id"] = m.dataset_id;
    if (m.subject_id) doc["subject_id"] = *m.subject_id;
    doc["sentences"] = json::array();
    for (const auto& rec : m.sentences) {
        json js;
        js["id"] = rec.id;
        js["duration_ms"] = rec.duration_ms;
        js["eeg"] = {{"path", relativize(rec.eeg_path)},
                     {"channels", rec.channels}};
        js["layers"] = json::array();
        for (const auto& lp : rec.layers) js["layers"].push_back(relativize(lp));
        if (rec.acoustic_path) js["acoustic"] = relativize(*rec.acoustic_path);
        if (rec.prosody_row) js["prosody_row"] = *rec.prosody_row;
        if (rec.affect_features)
            js["affect_features"] = std::vector<double>(
                rec.affect_features->begin(), rec.affect_features->end());
        doc["sentences"].push_back(std::move(js));
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << "\n";
}

}  // namespace xmrsa
