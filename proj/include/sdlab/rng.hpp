#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every stream is identified by (master_seed, substream). Draws are a pure
// function of (master_seed, substream, draw index), so replays are
// bit-identical and distinct substreams can be handed to parallel workers
// in any order without coordination.

#include <cstdint>
#include <array>
#include <cmath>
#include <stdexcept>

namespace sdlab {

struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t substream = 0;
};

namespace detail {

struct Philox4x32State {
    std::array<std::uint32_t, 4> ctr;
    std::array<std::uint32_t, 2> key;
};

inline void philox_round(std::array<std::uint32_t, 4>& x,
                         const std::array<std::uint32_t, 2>& k) {
    constexpr std::uint64_t M0 = 0xD2511F53u;
    constexpr std::uint64_t M1 = 0xCD9E8D57u;
    const std::uint64_t p0 = M0 * x[0];
    const std::uint64_t p1 = M1 * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t W0 = 0x9E3779B9u;
    constexpr std::uint32_t W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += W0;
            key[1] += W1;
        }
        philox_round(ctr, key);
    }
    return ctr;
}

} // namespace detail

class Rng {
public:
    Rng(std::uint64_t master_seed, std::uint64_t substream)
        : seed_(master_seed), stream_(substream) {}

    explicit Rng(RngSpec spec) : Rng(spec.master_seed, spec.substream) {}

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t substream() const { return stream_; }

    std::uint64_t next_u64() {
        if (avail_ == 0) refill();
        return buf_[--avail_];
    }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Unit-mean exponential.
    double exponential() { return -std::log(uniform_open01()); }

    // Standard normal (Box-Muller; consumes two words).
    double normal() {
        const double r = std::sqrt(2.0 * exponential());
        const double a = 6.283185307179586476925286766559 * uniform_open01();
        return r * std::cos(a);
    }

private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32)};
        const std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(seed_),
            static_cast<std::uint32_t>(seed_ >> 32)};
        const auto out = detail::philox4x32_10(ctr, key);
        buf_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buf_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        avail_ = 2;
        ++block_;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int avail_ = 0;
};

} // namespace sdlab
