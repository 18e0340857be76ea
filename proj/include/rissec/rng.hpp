// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random number generator (Philox-4x32-10).
//
// Every stochastic quantity in the project is drawn from this generator so
// that a (seed, stream) pair fully determines the result on any platform.
// The algorithm is the Philox-4x32 bijection with 10 rounds:
//   key     = (lo32(seed), hi32(seed)), bumped per round by the Weyl
//             constants 0x9E3779B9 and 0xBB67AE85
//   counter = (lo32(stream), hi32(stream), lo32(block), hi32(block))
// Each block yields four 32-bit words, consumed as two 64-bit outputs
// (word0 | word1<<32, word2 | word3<<32).
//
// Derived variates:
//   uniform in [0,1):  (u64 >> 11) * 2^-53
//   uniform in (0,1]:  ((u64 >> 11) + 1) * 2^-53
//   standard normal:   Box-Muller; r = sqrt(-2 ln u1), theta = 2 pi u2,
//                      returns r cos(theta) first, r sin(theta) second
//   complex normal:    CN(0, var) = sqrt(var/2) * (n0 + i n1)

#pragma once

#include <cstdint>

#include "rissec/types.hpp"

namespace rissec {

class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform01();      // [0, 1)
    double uniform_open0();  // (0, 1]
    double normal();         // N(0, 1)
    cx cnormal(double var);  // CN(0, var), real part drawn first

private:
    void refill();

    std::uint32_t key0_, key1_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint32_t buf_[4];
    int buf_pos_ = 4;
    double normal_cache_ = 0.0;
    bool has_normal_cache_ = false;
};

// Stream identifiers: one namespace for the whole project so draw order is
// documented in a single place.  purpose selects the consumer, sweep/trial
// index the experiment cell.
std::uint64_t rng_stream(std::uint32_t purpose, std::uint32_t sweep_index,
                         std::uint32_t trial_index);

inline constexpr std::uint32_t kStreamChannels = 1;
inline constexpr std::uint32_t kStreamInit = 2;
inline constexpr std::uint32_t kStreamPositions = 3; // pinned user drops
inline constexpr std::uint32_t kStreamTest = 900;

} // namespace rissec
