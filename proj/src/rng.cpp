// SPDX-License-Identifier: Apache-2.0

#include "rissec/rng.hpp"

#include <cmath>

namespace rissec {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr[0] = hi1 ^ ctr[1] ^ k0;
    ctr[1] = lo1;
    ctr[2] = hi0 ^ ctr[3] ^ k1;
    ctr[3] = lo0;
}

} // namespace

PhiloxRng::PhiloxRng(std::uint64_t seed, std::uint64_t stream)
    : key0_(static_cast<std::uint32_t>(seed)),
      key1_(static_cast<std::uint32_t>(seed >> 32)),
      stream_(stream) {}

void PhiloxRng::refill() {
    std::uint32_t ctr[4] = {
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
    };
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    buf_[0] = ctr[0];
    buf_[1] = ctr[1];
    buf_[2] = ctr[2];
    buf_[3] = ctr[3];
    buf_pos_ = 0;
    ++block_;
}

std::uint64_t PhiloxRng::next_u64() {
    if (buf_pos_ >= 4) refill();
    const std::uint64_t lo = buf_[buf_pos_];
    const std::uint64_t hi = buf_[buf_pos_ + 1];
    buf_pos_ += 2;
    return lo | (hi << 32);
}

double PhiloxRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxRng::uniform_open0() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double PhiloxRng::normal() {
    if (has_normal_cache_) {
        has_normal_cache_ = false;
        return normal_cache_;
    }
    const double u1 = uniform_open0();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    normal_cache_ = r * std::sin(theta);
    has_normal_cache_ = true;
    return r * std::cos(theta);
}

cx PhiloxRng::cnormal(double var) {
    const double s = std::sqrt(var * 0.5);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

std::uint64_t rng_stream(std::uint32_t purpose, std::uint32_t sweep_index,
                         std::uint32_t trial_index) {
    // 16 bits purpose | 16 bits sweep | 32 bits trial.
    return (static_cast<std::uint64_t>(purpose & 0xFFFFu) << 48) |
           (static_cast<std::uint64_t>(sweep_index & 0xFFFFu) << 32) |
           static_cast<std::uint64_t>(trial_index);
}

} // namespace rissec
