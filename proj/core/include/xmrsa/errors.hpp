#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace xmrsa {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- matrix / manifest I/O ----

class BadMagic : public Error {
public:
    explicit BadMagic(const std::string& path)
        : Error("bad magic at offset 0 in " + path) {}
};

class ShapeMismatch : public Error {
public:
    ShapeMismatch(const std::string& path, std::size_t expected_bytes,
                  std::size_t actual_bytes)
        : Error("shape mismatch in " + path + ": payload should be " +
                std::to_string(expected_bytes) + " bytes, file has " +
                std::to_string(actual_bytes) + " (offset " +
                std::to_string(std::min(expected_bytes, actual_bytes)) + ")") {}
};

class NonFiniteValue : public Error {
public:
    NonFiniteValue(const std::string& path, std::size_t offset)
        : Error("non-finite value in " + path + " at byte offset " +
                std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

class MissingFile : public Error {
public:
    explicit MissingFile(const std::string& path)
        : Error("missing file: " + path) {}
};

class InconsistentLayers : public Error {
public:
    InconsistentLayers(const std::string& sentence, std::size_t got,
                       std::size_t expected)
        : Error("sentence " + sentence + " has " + std::to_string(got) +
                " layers, expected " + std::to_string(expected)) {}
};

// ---- numerics ----

class ZeroVarianceColumn : public Error {
public:
    explicit ZeroVarianceColumn(std::size_t col)
        : Error("column " + std::to_string(col) + " has zero variance"),
          col_(col) {}
    std::size_t column() const { return col_; }

private:
    std::size_t col_;
};

class ZeroVariance : public Error {
public:
    explicit ZeroVariance(const std::string& what)
        : Error("zero variance: " + what) {}
};

class TooShort : public Error {
public:
    explicit TooShort(const std::string& what) : Error("too short: " + what) {}
};

class AllTies : public Error {
public:
    AllTies() : Error("all pairs tied; tau_b denominator is zero") {}
};

class DegenerateGram : public Error {
public:
    DegenerateGram() : Error("centered Gram matrix is zero") {}
};

class MissingFeatures : public Error {
public:
    explicit MissingFeatures(const std::string& sentence)
        : Error("sentence " + sentence + " lacks required features") {}
};

class ZeroVarianceAcrossSentences : public Error {
public:
    explicit ZeroVarianceAcrossSentences(std::size_t feature)
        : Error("affect feature " + std::to_string(feature) +
                " has zero variance across sentences") {}
};

class BadBounds : public Error {
public:
    explicit BadBounds(const std::string& what) : Error("bad bounds: " + what) {}
};

class BadWindow : public Error {
public:
    explicit BadWindow(const std::string& what) : Error("bad window: " + what) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& what)
        : Error("out of range: " + what) {}
};

class AllZero : public Error {
public:
    AllZero() : Error("all variance parameters are zero") {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

// Accumulates non-fatal diagnostics (constant rows, reseeded clusters, ...).
// Operations that can warn take an optional pointer; nullptr discards.
struct Warnings {
    std::vector<std::string> messages;

    void add(std::string msg) { messages.push_back(std::move(msg)); }
    std::size_t count() const { return messages.size(); }
    bool empty() const { return messages.empty(); }
};

inline void warn(Warnings* w, std::string msg) {
    if (w) w->add(std::move(msg));
}

}  // namespace xmrsa
