#pragma once

// Counter-based random streams. Every replica, tile and walk derives its own
// stream from (master seed, stream id), so results do not depend on how work
// is split across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace geowalk {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to hash stream labels into 64-bit ids.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combine a parent seed with a sequence of labels into a child seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t h = splitmix64(seed);
    for (auto l : labels) h = splitmix64(h ^ splitmix64(l + 0x632BE59BD9B4E019ULL));
    return h;
}

/// A reproducible random stream; satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (cursor_ == 2) refill();
        return buffer_[cursor_++];
    }

    /// Independent stream labelled by `label` (stable across runs).
    Rng child(std::uint64_t label) const { return Rng(derive_seed(seed_, {stream_, label}), 0); }
    Rng child(std::uint64_t a, std::uint64_t b) const { return Rng(derive_seed(seed_, {stream_, a, b}), 0); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

    /// Uniform integer in [0, n), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n);

    /// Exponential(rate) by inverse CDF; never returns zero.
    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    double normal();
    std::int64_t poisson(double mean);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace geowalk
