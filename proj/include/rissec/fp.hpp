// SPDX-License-Identifier: Apache-2.0
//
// Fractional-programming decomposition of the secrecy rate.  For user k the
// unclamped rate splits into three parts,
//   f1_k = ln(1 + sinr_k)
//   f2_k = -ln(1 + (|Hb_e^H w_k|^2 + tr[Ups_t Hb_e Hb_e^H]) / noise_eve)
//   f3   =  ln(1 + tr[Ups_t Hb_e Hb_e^H] / noise_eve),
// each replaced by a concave lower bound with auxiliary variables that make
// the bound tight at the current operating point:
//   f1_k: (u_k, v_k) via the quadratic transform of the log-SINR,
//   f2_k: d_k via the linearization of -ln,
//   f3:   (p, q) with the inner fraction expanded around the current point;
//         q has one shape per block, q_w over the stacked precoder and
//         q_phi over the distortion-loaded eavesdropper channel.
// Every update below is the closed-form argmax of its bound, so after a full
// refresh the bound equals the unclamped rate exactly.

#pragma once

#include "rissec/rate.hpp"

namespace rissec {

struct AuxState {
    std::vector<cvec> u; // K vectors, each M+1
    rvec v;              // K, nonnegative
    rvec d;              // K, in (0, 1]
    double p = 1.0;      // >= 1, shared by both f3 parameterizations
    cvec q_w;            // N*K
    cmat q_phi;          // N x (M+1)
};

enum class F3Mode { w_case, phi_case };

// Closed-form argmax updates at the state's operating point.
void update_user_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                     const SystemConfig& config);
void update_eve_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                    const SystemConfig& config);
void update_f3_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                   const SystemConfig& config);

AuxState make_aux(const BeamState& state, const EffSet& effs, const SystemConfig& config);
void update_all_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                    const SystemConfig& config);

// f1_k + f2_k + f3 lower bound (nats, unweighted, may be negative) at the
// given state and auxiliary variables.  The f3 term uses the q shape
// selected by mode.
double lower_bound_rate(const BeamState& state, const AuxState& aux, const EffSet& effs,
                        int k, F3Mode mode, const SystemConfig& config);

// tr[Ups_t Hb_e Hb_e^H]
double eve_tx_distortion_trace(const cmat& w_mat, const EffectiveChannel& eff_e,
                               double kappa_t);

// Diagonal of the Kronecker factor of f3's precoder-side quadratic:
// l_diag repeats sqrt(kappa_t * diag(Hb_e Hb_e^H)) once per user column.
rvec f3_l_diag(const EffectiveChannel& eff_e, double kappa_t, int k_users);

} // namespace rissec
