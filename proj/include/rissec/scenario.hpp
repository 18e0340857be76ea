// SPDX-License-Identifier: Apache-2.0
//
// Channel scenario: deployment geometry, distance-based path loss, and the
// random draw of all five links of one trial.
//
// Draw order inside generate_channels is fixed and documented so that a
// (config, seed) pair reproduces the channel set bit for bit:
//   1. user positions, per user: x offset then y offset (uniform in the square)
//   2. per user: direct BS-user vector (N complex normals)
//   3. BS-eavesdropper vector (N)
//   4. BS-RIS matrix, row major (M x N)
//   5. per user: RIS-user vector (M)
//   6. RIS-eavesdropper vector (M)
// Complex normals draw the real part before the imaginary part.

#pragma once

#include <cstdint>
#include <vector>

#include "rissec/config.hpp"
#include "rissec/types.hpp"

namespace rissec {

struct ChannelSet {
    std::vector<cvec> h_bu; // K direct BS-user channels, each N
    cvec h_be;              // BS-eavesdropper, N
    cmat h_br;              // BS-RIS, M x N
    std::vector<cvec> h_ru; // K RIS-user channels, each M
    cvec h_re;              // RIS-eavesdropper, M
};

// Log-distance path loss in dB at reference distance 1 m:
//   -30 - 10 * exponent * log10(d).  d < 1 is a domain error.
double path_loss_db(double d_m, double exponent);
double path_loss_linear(double d_m, double exponent);

// Rank-one line-of-sight component a_rx(angle) * a_tx(angle)^H for a
// uniform linear array with half-wavelength spacing.  Angles are azimuth
// only: sin(theta) = dy / sqrt(dx^2 + dy^2) toward the far endpoint, so a
// link along the x axis is boresight and the component is all ones.
// Coincident horizontal coordinates are a geometry error.
cmat los_component(const Vec3& tx, const Vec3& rx, int n_tx, int n_rx);

// User positions only (draw step 1), for callers that pin positions across
// trials while redrawing fading.
std::vector<Vec3> draw_user_positions(const SystemConfig& config, std::uint64_t seed,
                                      std::uint64_t stream = 0);

// Draws one trial: user positions, then all links.  RIS links are Rician
// with the configured factor, direct links are Rayleigh; every entry is
// scaled so its expected squared magnitude equals the linear path loss.
ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed,
                             std::uint64_t stream = 0);

// Same fading draw order but at fixed user positions; the stream feeds the
// fading draws only (steps 2-6).
ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed,
                             std::uint64_t stream,
                             const std::vector<Vec3>& positions);

} // namespace rissec
