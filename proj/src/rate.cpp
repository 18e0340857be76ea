// SPDX-License-Identifier: Apache-2.0

#include "rissec/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace rissec {

BeamState::BeamState(cmat w, cvec phases, double p_max)
    : w_mat(std::move(w)), phi(std::move(phases)) {
    const double power = w_mat.squaredNorm();
    if (power > p_max + 1e-9)
        throw std::invalid_argument("BeamState: precoder exceeds the power budget");
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        if (std::abs(std::abs(phi(i)) - 1.0) > 1e-9)
            throw std::invalid_argument("BeamState: phase entries must have unit modulus");
    w_vec = Eigen::Map<const cvec>(w_mat.data(), w_mat.size());
}

rvec distortion_covariance(const cmat& w_mat, double kappa_t) {
    return kappa_t * w_mat.rowwise().squaredNorm();
}

namespace {

// tr[(W W^H + kappa_t diag(W W^H)) Hb Hb^H]
double loaded_gram_trace(const cmat& w_mat, const EffectiveChannel& eff, double kappa_t) {
    const double full = (eff.stacked.adjoint() * w_mat).squaredNorm();
    const rvec w_rows = w_mat.rowwise().squaredNorm();
    const rvec h_rows = eff.stacked.rowwise().squaredNorm();
    return full + kappa_t * w_rows.dot(h_rows);
}

} // namespace

double receiver_distortion(const cmat& w_mat, const EffectiveChannel& eff,
                           double kappa_t, double kappa_r) {
    return kappa_r * loaded_gram_trace(w_mat, eff, kappa_t);
}

double user_sinr(const BeamState& state, const EffectiveChannel& eff_k, int k,
                 const SystemConfig& config) {
    const cmat projected = eff_k.stacked.adjoint() * state.w_mat; // (M+1) x K
    const double signal = projected.col(k).squaredNorm();
    double interference = projected.squaredNorm() - signal;

    const rvec ups_t = distortion_covariance(state.w_mat, config.kappa_t);
    const rvec h_rows = eff_k.stacked.rowwise().squaredNorm();
    const double tx_distortion = ups_t.dot(h_rows);
    const double rx_distortion =
        receiver_distortion(state.w_mat, eff_k, config.kappa_t, config.kappa_r);

    return signal / (interference + tx_distortion + rx_distortion + config.noise_user);
}

double user_sinr(const BeamState& state, const ChannelSet& ch, int k,
                 const SystemConfig& config, const HiStats& stats) {
    return user_sinr(state, effective_channel_user(state.phi, ch, k, stats), k, config);
}

double eve_rate(const BeamState& state, const EffectiveChannel& eff_e, int k,
                const SystemConfig& config) {
    const double signal = (eff_e.stacked.adjoint() * state.w_mat.col(k)).squaredNorm();
    const rvec ups_t = distortion_covariance(state.w_mat, config.kappa_t);
    const rvec h_rows = eff_e.stacked.rowwise().squaredNorm();
    const double tx_distortion = ups_t.dot(h_rows);
    return std::log1p(signal / (tx_distortion + config.noise_eve));
}

double secrecy_rate(const BeamState& state, const EffSet& effs, int k,
                    const SystemConfig& config) {
    const double r_user =
        std::log1p(user_sinr(state, effs.user.at(static_cast<std::size_t>(k)), k, config));
    const double r_eve = eve_rate(state, effs.eve, k, config);
    return std::max(0.0, r_user - r_eve);
}

double secrecy_rate(const BeamState& state, const ChannelSet& ch, int k,
                    const SystemConfig& config, const HiStats& stats) {
    return secrecy_rate(state, make_eff_set(state.phi, ch, stats), k, config);
}

WmsrResult wmsr(const BeamState& state, const EffSet& effs, const SystemConfig& config) {
    WmsrResult res;
    for (int k = 0; k < config.k_users; ++k) {
        const double weighted =
            config.weights[static_cast<std::size_t>(k)] * secrecy_rate(state, effs, k, config);
        if (k == 0 || weighted < res.value) {
            res.value = weighted;
            res.argmin = k;
        }
    }
    return res;
}

WmsrResult wmsr(const BeamState& state, const ChannelSet& ch, const SystemConfig& config,
                const HiStats& stats) {
    return wmsr(state, make_eff_set(state.phi, ch, stats), config);
}

} // namespace rissec
