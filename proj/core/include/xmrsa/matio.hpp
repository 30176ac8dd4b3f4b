#pragma once

#include <filesystem>
#include <string>

#include "xmrsa/mat.hpp"

namespace xmrsa {

// Binary matrix file, little-endian throughout:
//   bytes 0-3    magic "RSAM"
//   bytes 4-7    version, u32 = 1
//   bytes 8-15   rows, u64
//   bytes 16-23  cols, u64
//   bytes 24-    rows*cols IEEE-754 binary32 values, row-major
//
// Values are widened to double on load. Every value must be finite;
// load failures name the offending byte offset.
Mat load_matrix(const std::filesystem::path& path);

// Values are narrowed to binary32 on write. write_matrix(load_matrix(p))
// reproduces p byte for byte.
void write_matrix(const std::filesystem::path& path, const Mat& m);

}  // namespace xmrsa
