#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fairshare {

// Vigna's splitmix64 finalizer; used to spread seed material.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the stream label so that streams are identified by name,
// not by registration order.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view stream_id) noexcept {
    return splitmix64(splitmix64(seed) ^ fnv1a64(stream_id));
}

// One independent random stream per consumer. mt19937_64 has a fully
// specified sequence, so the same (seed, stream_id) reproduces the same
// samples on every platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id)
        : gen_(derive_stream_seed(seed, stream_id)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution. Never returns 1.0.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n must be > 0. Rejection-free modulo is
    // fine here: bias is < 2^-53 of a bucket for the n used in tests.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace fairshare
