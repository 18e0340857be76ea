// SPDX-License-Identifier: Apache-2.0

#include "rissec/fp.hpp"

#include <cmath>

namespace rissec {

namespace {

// tr[(W W^H + kappa_t diag(W W^H)) Hb Hb^H]
double loaded_gram_trace(const cmat& w_mat, const EffectiveChannel& eff, double kappa_t) {
    const double full = (eff.stacked.adjoint() * w_mat).squaredNorm();
    const rvec w_rows = w_mat.rowwise().squaredNorm();
    const rvec h_rows = eff.stacked.rowwise().squaredNorm();
    return full + kappa_t * w_rows.dot(h_rows);
}

} // namespace

double eve_tx_distortion_trace(const cmat& w_mat, const EffectiveChannel& eff_e,
                               double kappa_t) {
    const rvec ups = distortion_covariance(w_mat, kappa_t);
    const rvec h_rows = eff_e.stacked.rowwise().squaredNorm();
    return ups.dot(h_rows);
}

rvec f3_l_diag(const EffectiveChannel& eff_e, double kappa_t, int k_users) {
    const int n = static_cast<int>(eff_e.stacked.rows());
    const rvec per_antenna =
        (kappa_t * eff_e.stacked.rowwise().squaredNorm()).cwiseSqrt();
    rvec l(n * k_users);
    for (int k = 0; k < k_users; ++k) l.segment(k * n, n) = per_antenna;
    return l;
}

void update_user_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                     const SystemConfig& config) {
    const int k_users = config.k_users;
    aux.u.resize(static_cast<std::size_t>(k_users));
    aux.v.resize(k_users);
    for (int k = 0; k < k_users; ++k) {
        const EffectiveChannel& eff = effs.user[static_cast<std::size_t>(k)];
        aux.v(k) = user_sinr(state, eff, k, config);
        const double denom = (1.0 + config.kappa_r) *
                                 loaded_gram_trace(state.w_mat, eff, config.kappa_t) +
                             config.noise_user;
        aux.u[static_cast<std::size_t>(k)] =
            (std::sqrt(1.0 + aux.v(k)) / denom) * (eff.stacked.adjoint() * state.w_mat.col(k));
    }
}

void update_eve_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                    const SystemConfig& config) {
    const int k_users = config.k_users;
    aux.d.resize(k_users);
    const double tx_distortion =
        eve_tx_distortion_trace(state.w_mat, effs.eve, config.kappa_t);
    for (int k = 0; k < k_users; ++k) {
        const double leak = (effs.eve.stacked.adjoint() * state.w_mat.col(k)).squaredNorm();
        aux.d(k) = 1.0 / (1.0 + (leak + tx_distortion) / config.noise_eve);
    }
}

void update_f3_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                   const SystemConfig& config) {
    const double tx_distortion =
        eve_tx_distortion_trace(state.w_mat, effs.eve, config.kappa_t);
    aux.p = 1.0 + tx_distortion / config.noise_eve;

    const rvec l = f3_l_diag(effs.eve, config.kappa_t, config.k_users);
    const cvec lw = state.w_vec.cwiseProduct(l.cast<cx>());
    aux.q_w = lw / (lw.squaredNorm() + config.noise_eve);

    const cvec j =
        distortion_covariance(state.w_mat, config.kappa_t).cwiseSqrt().cast<cx>();
    const cmat jh = j.asDiagonal() * effs.eve.stacked;
    aux.q_phi = jh / (jh.squaredNorm() + config.noise_eve);
}

void update_all_aux(AuxState& aux, const BeamState& state, const EffSet& effs,
                    const SystemConfig& config) {
    update_user_aux(aux, state, effs, config);
    update_eve_aux(aux, state, effs, config);
    update_f3_aux(aux, state, effs, config);
}

AuxState make_aux(const BeamState& state, const EffSet& effs, const SystemConfig& config) {
    AuxState aux;
    update_all_aux(aux, state, effs, config);
    return aux;
}

double lower_bound_rate(const BeamState& state, const AuxState& aux, const EffSet& effs,
                        int k, F3Mode mode, const SystemConfig& config) {
    const EffectiveChannel& eff_k = effs.user[static_cast<std::size_t>(k)];
    const cvec& u = aux.u[static_cast<std::size_t>(k)];
    const double v = aux.v(k);
    const double d = aux.d(k);
    const double u_norm2 = u.squaredNorm();

    const double f1 =
        std::log1p(v) - v - config.noise_user * u_norm2 -
        (1.0 + config.kappa_r) * u_norm2 *
            loaded_gram_trace(state.w_mat, eff_k, config.kappa_t) +
        2.0 * std::sqrt(1.0 + v) *
            (u.adjoint() * (eff_k.stacked.adjoint() * state.w_mat.col(k)))(0).real();

    const double tx_distortion =
        eve_tx_distortion_trace(state.w_mat, effs.eve, config.kappa_t);
    const double leak = (effs.eve.stacked.adjoint() * state.w_mat.col(k)).squaredNorm();
    const double f2 =
        -d * (1.0 + (leak + tx_distortion) / config.noise_eve) + std::log(d) + 1.0;

    double f3 = 0.0;
    if (mode == F3Mode::w_case) {
        const rvec l = f3_l_diag(effs.eve, config.kappa_t, config.k_users);
        const cvec lw = state.w_vec.cwiseProduct(l.cast<cx>());
        f3 = -aux.p * (lw.squaredNorm() + config.noise_eve) * aux.q_w.squaredNorm() +
             2.0 * aux.p * aux.q_w.dot(lw).real() - aux.p + std::log(aux.p) + 1.0;
    } else {
        const cvec j =
            distortion_covariance(state.w_mat, config.kappa_t).cwiseSqrt().cast<cx>();
        const cmat jh = j.asDiagonal() * effs.eve.stacked;
        const double cross = aux.q_phi.cwiseProduct(jh.conjugate()).sum().real();
        f3 = -aux.p * (jh.squaredNorm() + config.noise_eve) * aux.q_phi.squaredNorm() +
             2.0 * aux.p * cross - aux.p + std::log(aux.p) + 1.0;
    }
    return f1 + f2 + f3;
}

} // namespace rissec
