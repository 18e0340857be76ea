// SPDX-License-Identifier: Apache-2.0
//
// Hardware-impairment statistics of the RIS phase noise and the resulting
// effective channels.
//
// Each RIS element adds a phase error uniform on [-pi/2, pi/2].  With
// psi_m = e^{j theta_m} this gives elementwise means
//   E{psi_m} = 2/pi,   E{psi_m^* psi_n} = 4/pi^2 (m != n),  = 1 (m = n),
// so E{psi^* psi^T} = I + G with G carrying 4/pi^2 off the diagonal.
//
// Averaging the cascaded channel over the phase noise splits it into a mean
// part and a spread part.  Writing rho_mean = 2/pi and
// rho_spread = sqrt(1 - 4/pi^2), the stacked effective channel
//   stacked = [h_hat, h_mat]  (N x (M+1))
// satisfies stacked * stacked^H = E{h h^H} exactly, where
//   h_hat^H = rho_mean * h_r^H diag(phi) H_br + h_b^H
//   h_mat^H = rho_spread * diag(h_r^H) diag(phi) H_br.
// The ideal (no phase noise) model is the same assembly with rho_mean = 1,
// rho_spread = 0.

#pragma once

#include "rissec/scenario.hpp"
#include "rissec/types.hpp"

namespace rissec {

struct HiStats {
    double rho_mean;
    double rho_spread;

    static HiStats robust();
    static HiStats ideal();
};

// I + G for M elements; M = 0 yields an empty matrix.
rmat phase_noise_second_moment(int m_ris);
// E{psi} for M elements.
rvec phase_noise_first_moment(int m_ris);

struct EffectiveChannel {
    cvec h_hat;   // N, mean component including the direct link
    cmat h_mat;   // N x M, spread component
    cmat stacked; // N x (M+1), [h_hat, h_mat]
};

// Requires |phi_m| = 1 within 1e-9.  With M = 0 the stacked channel is the
// direct link alone.
EffectiveChannel effective_channel(const cvec& phi, const cvec& h_r, const cvec& h_b,
                                   const cmat& h_br, const HiStats& stats);

EffectiveChannel effective_channel_user(const cvec& phi, const ChannelSet& ch, int k,
                                        const HiStats& stats = HiStats::robust());
EffectiveChannel effective_channel_eve(const cvec& phi, const ChannelSet& ch,
                                       const HiStats& stats = HiStats::robust());

// Phase-noise-free cascade rho_mean = 1, rho_spread = 0 (vector part only).
cvec ideal_effective_channel(const cvec& phi, const cvec& h_r, const cvec& h_b,
                             const cmat& h_br);

// Effective channels of every receiver at one phase setting.
struct EffSet {
    std::vector<EffectiveChannel> user; // K entries
    EffectiveChannel eve;
};

EffSet make_eff_set(const cvec& phi, const ChannelSet& ch,
                    const HiStats& stats = HiStats::robust());

} // namespace rissec
