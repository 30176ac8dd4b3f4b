#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace xmrsa {

// Counter-based generator built on the SplitMix64 finalizer
// (Steele, Lea & Flood 2014; same mixer as xorshift's splitmix64).
// Output i of a stream with key k is
//
//     out(i) = mix64(k + (i+1) * 0x9E3779B97F4A7C15)
//
// so draws are pure functions of (key, counter): any draw index can be
// computed independently, streams never overlap for distinct keys, and a
// re-implementation in another language reproduces the byte stream exactly.
//
// Stream keys are derived from a master seed and an id path (e.g.
// {sentence, layer, draw}) by iterated mixing; see stream_key below.
class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix64(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ull;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBull;
        x ^= x >> 31;
        return x;
    }

    // key(seed, {a, b, ...}) = fold of mix64(key + gamma + id) over the path.
    static std::uint64_t stream_key(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) {
        std::uint64_t k = mix64(seed + kGamma);
        for (std::uint64_t id : path) k = mix64(k + kGamma + id);
        return k;
    }

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
        : key_(stream_key(seed, path)) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

    // Uniform in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased via rejection on the top range.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Standard normal via Box-Muller on consecutive uniform pairs;
    // the sine variate is cached and returned on the next call.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_double();  // (0,1], keeps log finite
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // In-place Fisher-Yates: for i = n-1 .. 1, swap a[i] with a[next_below(i+1)].
    template <typename T>
    void shuffle(std::vector<T>& a) {
        for (std::size_t i = a.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(a[i - 1], a[j]);
        }
    }

    // Identity permutation of length n shuffled by this stream.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace xmrsa
