#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <vector>

#include "test_util.hpp"
#include "xmrsa/errors.hpp"
#include "xmrsa/manifest.hpp"
#include "xmrsa/matio.hpp"

using namespace xmrsa;
using testutil::TempDir;

namespace {

std::vector<char> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const std::filesystem::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("writer then reader round-trips a 2x3 matrix") {
    TempDir dir("matio");
    const Mat m(2, 3, {1, 2, 3, 4, 5, 6});
    const auto p = dir.path() / "m.rsam";
    write_matrix(p, m);
    const Mat back = load_matrix(p);
    REQUIRE(back.rows == 2);
    REQUIRE(back.cols == 3);
    CHECK(back.data == std::vector<double>({1, 2, 3, 4, 5, 6}));
}

TEST_CASE("load then write reproduces the file byte for byte") {
    TempDir dir("matio");
    CounterRng rng(5, {1});
    const Mat m = testutil::random_mat(13, 7, rng);
    const auto p1 = dir.path() / "a.rsam", p2 = dir.path() / "b.rsam";
    write_matrix(p1, m);
    write_matrix(p2, load_matrix(p1));
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("bad magic is rejected") {
    TempDir dir("matio");
    const auto p = dir.path() / "bad.rsam";
    write_matrix(p, Mat(2, 2, {1, 2, 3, 4}));
    auto bytes = slurp(p);
    std::memcpy(bytes.data(), "XXXX", 4);
    spit(p, bytes);
    CHECK_THROWS_AS(load_matrix(p), BadMagic);
}

TEST_CASE("payload size must match the declared shape") {
    TempDir dir("matio");
    const auto p = dir.path() / "short.rsam";
    write_matrix(p, Mat(2, 2, {1, 2, 3, 4}));
    auto bytes = slurp(p);
    bytes.resize(bytes.size() - 4);  // declares 2x2, contains 3 values
    spit(p, bytes);
    CHECK_THROWS_AS(load_matrix(p), ShapeMismatch);

    bytes.push_back(0);  // neither 3 nor 4 values
    bytes.push_back(0);
    spit(p, bytes);
    CHECK_THROWS_AS(load_matrix(p), ShapeMismatch);
}

TEST_CASE("non-finite values carry the offending offset") {
    TempDir dir("matio");
    const auto p = dir.path() / "nan.rsam";
    write_matrix(p, Mat(2, 2, {1, 2, 3, 4}));
    auto bytes = slurp(p);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(bytes.data() + 24 + 2 * 4, &nan, 4);  // third value
    spit(p, bytes);
    try {
        load_matrix(p);
        FAIL("expected NonFiniteValue");
    } catch (const NonFiniteValue& e) {
        CHECK(e.offset() == 24 + 2 * 4);
    }
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_matrix("/nonexistent/xyz.rsam"), MissingFile);
}

namespace {

Manifest make_manifest(const TempDir& dir, std::size_t layers_b = 3) {
    CounterRng rng(11, {0});
    Manifest m;
    m.dataset_id = "unit";
    for (int s = 0; s < 2; ++s) {
        SentenceRecord rec;
        rec.id = s == 0 ? "a" : "b";
        rec.duration_ms = 900.0 + s;
        rec.eeg_path = dir.path() / (rec.id + "_eeg.rsam");
        write_matrix(rec.eeg_path, testutil::random_mat(10, 4, rng));
        rec.channels = {"c1", "c2", "c3", "c4"};
        const std::size_t L = s == 0 ? 3 : layers_b;
        for (std::size_t l = 0; l < L; ++l) {
            rec.layers.push_back(dir.path() /
                                 (rec.id + "_l" + std::to_string(l) + ".rsam"));
            write_matrix(rec.layers.back(), testutil::random_mat(8, 5, rng));
        }
        m.sentences.push_back(std::move(rec));
    }
    return m;
}

}  // namespace

TEST_CASE("manifest round-trip with layer count") {
    TempDir dir("manifest");
    const auto path = dir.path() / "manifest.json";
    write_manifest(path, make_manifest(dir));
    const Manifest m = load_manifest(path);
    CHECK(m.sentences.size() == 2);
    CHECK(m.layer_count() == 3);
    CHECK(m.sentences[0].id == "a");
    CHECK(m.sentences[1].duration_ms == doctest::Approx(901.0));
}

TEST_CASE("inconsistent layer counts are rejected") {
    TempDir dir("manifest");
    const auto path = dir.path() / "manifest.json";
    write_manifest(path, make_manifest(dir, 4));
    CHECK_THROWS_AS(load_manifest(path), InconsistentLayers);
}

TEST_CASE("duplicate sentence ids name both positions") {
    TempDir dir("manifest");
    Manifest m = make_manifest(dir);
    m.sentences[1].id = "a";
    m.sentences[1].layers.resize(3);
    const auto path = dir.path() / "manifest.json";
    write_manifest(path, m);
    try {
        load_manifest(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("positions 0 and 1") != std::string::npos);
    }
}

TEST_CASE("referenced files are checked eagerly") {
    TempDir dir("manifest");
    Manifest m = make_manifest(dir);
    std::filesystem::remove(m.sentences[1].layers[2]);
    const auto path = dir.path() / "manifest.json";
    write_manifest(path, m);
    CHECK_THROWS_AS(load_manifest(path), MissingFile);
}

TEST_CASE("prosody rows must have 13 entries") {
    TempDir dir("manifest");
    Manifest m = make_manifest(dir);
    m.sentences[0].prosody_row = std::vector<double>(12, 0.0);
    const auto path = dir.path() / "manifest.json";
    write_manifest(path, m);
    CHECK_THROWS_AS(load_manifest(path), ParseError);
}

TEST_CASE("malformed json is a parse error") {
    TempDir dir("manifest");
    const auto path = dir.path() / "broken.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_manifest(path), ParseError);
}
