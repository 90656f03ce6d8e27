#pragma once

#include <cstdint>
#include <string_view>

namespace mrseg {

// Counter-based randomness. Every draw is a pure function of
// (seed, stream label, counter), so parallel callers get identical
// results regardless of schedule or thread count.

// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// FNV-1a over a label string, for deriving stream keys from names.
constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : label) {
        h ^= std::uint64_t(std::uint8_t(c));
        h *= 0x100000001B3ull;
    }
    return h;
}

class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label)
        : key_(mix64(seed ^ mix64(hash_label(label)))) {}

    // The i-th raw draw of this stream.
    std::uint64_t bits(std::uint64_t counter) const {
        return mix64(key_ ^ mix64(counter));
    }

    // Uniform in [0,1).
    double uniform(std::uint64_t counter) const {
        return double(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
        return std::uint64_t(uniform(counter) * double(n)) % n;
    }

    // Independent child stream, e.g. one per bootstrap replicate.
    RngStream substream(std::uint64_t index) const {
        RngStream s = *this;
        s.key_ = mix64(key_ ^ mix64(index + 0x6A09E667F3BCC909ull));
        return s;
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace mrseg
