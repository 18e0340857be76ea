// SPDX-License-Identifier: Apache-2.0
//
// Average rate expressions under transceiver distortion and RIS phase
// noise.  All rates are in nats (natural logarithm).
//
// With stacked effective channels Hb_k (users) and Hb_e (eavesdropper):
//   sinr_k = |Hb_k^H w_k|^2 /
//            ( sum_{i != k} |Hb_k^H w_i|^2 + tr[Ups_t Hb_k Hb_k^H]
//              + gamma_r,k + noise_user )
//   Ups_t      = kappa_t diag(W W^H)
//   gamma_r,k  = kappa_r tr[(W W^H + kappa_t diag(W W^H)) Hb_k Hb_k^H]
//   rate_eve,k = ln(1 + |Hb_e^H w_k|^2 / (tr[Ups_t Hb_e Hb_e^H] + noise_eve))
//   secrecy_k  = max(0, ln(1 + sinr_k) - rate_eve,k)
// and the objective is min_k weight_k * secrecy_k.

#pragma once

#include "rissec/config.hpp"
#include "rissec/himodel.hpp"
#include "rissec/types.hpp"

namespace rissec {

struct BeamState {
    cmat w_mat; // N x K precoder
    cvec w_vec; // column stacking of w_mat
    cvec phi;   // M unit-modulus phases

    BeamState() = default;
    // Checks tr(W^H W) <= p_max + 1e-9 and |phi_m| = 1 within 1e-9.
    BeamState(cmat w, cvec phases, double p_max);
};

// Diagonal of the transmit-distortion covariance kappa_t diag(W W^H).
rvec distortion_covariance(const cmat& w_mat, double kappa_t);

// kappa_r tr[(W W^H + kappa_t diag(W W^H)) Hb Hb^H] for one receiver.
double receiver_distortion(const cmat& w_mat, const EffectiveChannel& eff,
                           double kappa_t, double kappa_r);

double user_sinr(const BeamState& state, const EffectiveChannel& eff_k, int k,
                 const SystemConfig& config);
double user_sinr(const BeamState& state, const ChannelSet& ch, int k,
                 const SystemConfig& config, const HiStats& stats = HiStats::robust());

double eve_rate(const BeamState& state, const EffectiveChannel& eff_e, int k,
                const SystemConfig& config);

// Clamped at zero.
double secrecy_rate(const BeamState& state, const EffSet& effs, int k,
                    const SystemConfig& config);
double secrecy_rate(const BeamState& state, const ChannelSet& ch, int k,
                    const SystemConfig& config, const HiStats& stats = HiStats::robust());

struct WmsrResult {
    double value = 0.0; // min_k weight_k * secrecy_k, >= 0
    int argmin = 0;     // smallest index attaining the minimum
};

WmsrResult wmsr(const BeamState& state, const EffSet& effs, const SystemConfig& config);
WmsrResult wmsr(const BeamState& state, const ChannelSet& ch, const SystemConfig& config,
                const HiStats& stats = HiStats::robust());

} // namespace rissec
