#pragma once

#include <cstdint>
#include <string_view>

namespace vhg {

// splitmix64. Chosen over <random> engines so that streams are bit-stable
// across standard libraries; replay determinism depends on it.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform in [0, n). Modulo bias is negligible for the small n used here.
    std::uint64_t below(std::uint64_t n) {
        return n == 0 ? 0 : next() % n;
    }

    bool bernoulli(double p) {
        return uniform01() < p;
    }

private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    Rng r(h);
    return r.next();
}
}  // namespace detail

// Derives an independent stream seed from a root seed, a purpose tag, and
// integer coordinates (round, candidate index, sample index, ...). Streams
// for distinct (tag, coordinates) never collide in practice.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = root;
    std::uint64_t fnv = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        fnv ^= c;
        fnv *= 0x100000001b3ULL;
    }
    h = detail::mix(h, fnv);
    h = detail::mix(h, a);
    h = detail::mix(h, b);
    return h;
}

}  // namespace vhg
