#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace qoi {

// 64-bit FNV-1a over a byte string.
constexpr std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Derive an independent stream seed from a master seed and a stream name, so
// per-contributor generation does not depend on generation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_name) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((master >> (8 * i)) & 0xff);
    return fnv1a(stream_name, fnv1a(std::string_view(bytes, 8)));
}

// Deterministic random source. The draw sequence is fully specified by the
// seed and identical across platforms: uniforms are built directly from
// mt19937_64 output and normals via Box-Muller, because the distribution
// adaptors in <random> are not portable between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform index in [0, n); n must be positive. Rejection keeps it unbiased.
    std::size_t next_index(std::size_t n) {
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return static_cast<std::size_t>(x % span);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qoi
