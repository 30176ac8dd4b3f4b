#include "xmrsa/matio.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "xmrsa/errors.hpp"

namespace xmrsa {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'A', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 24;

static_assert(std::endian::native == std::endian::little,
              "matrix I/O assumes a little-endian host");

}  // namespace

Mat load_matrix(const std::filesystem::path& path) {
    std::error_code ec;
    const auto file_bytes = std::filesystem::file_size(path, ec);
    if (ec) throw MissingFile(path.string());

    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path.string());

    char header[kHeaderBytes];
    in.read(header, kHeaderBytes);
    if (in.gcount() < static_cast<std::streamsize>(kHeaderBytes) ||
        std::memcmp(header, kMagic, 4) != 0)
        throw BadMagic(path.string());

    std::uint32_t version;
    std::memcpy(&version, header + 4, 4);
    if (version != kVersion)
        throw ParseError(path.string() + ": unsupported matrix version " +
                         std::to_string(version));

    std::uint64_t rows, cols;
    std::memcpy(&rows, header + 8, 8);
    std::memcpy(&cols, header + 16, 8);
    if (rows < 1 || cols < 1)
        throw ParseError(path.string() + ": empty matrix (" +
                         std::to_string(rows) + "x" + std::to_string(cols) + ")");

    const std::size_t n = static_cast<std::size_t>(rows * cols);
    const std::size_t expect_bytes = kHeaderBytes + n * sizeof(float);
    if (file_bytes != expect_bytes)
        throw ShapeMismatch(path.string(), expect_bytes,
                            static_cast<std::size_t>(file_bytes));

    std::vector<float> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float))
        throw ShapeMismatch(path.string(), expect_bytes,
                            kHeaderBytes + static_cast<std::size_t>(in.gcount()));

    Mat m(rows, cols);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(raw[i]))
            throw NonFiniteValue(path.string(), kHeaderBytes + i * sizeof(float));
        m.data[i] = static_cast<double>(raw[i]);
    }
    return m;
}

void write_matrix(const std::filesystem::path& path, const Mat& m) {
    if (m.rows < 1 || m.cols < 1)
        throw ParseError("refusing to write empty matrix to " + path.string());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");

    out.write(kMagic, 4);
    const std::uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint64_t rows = m.rows, cols = m.cols;
    out.write(reinterpret_cast<const char*>(&rows), 8);
    out.write(reinterpret_cast<const char*>(&cols), 8);

    std::vector<float> raw(m.data.size());
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        raw[i] = static_cast<float>(m.data[i]);
        if (!std::isfinite(raw[i]))
            throw NonFiniteValue(path.string(), kHeaderBytes + i * sizeof(float));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(float)));
    if (!out) throw Error("short write to " + path.string());
}

}  // namespace xmrsa
