// SPDX-License-Identifier: Apache-2.0

#include "rissec/himodel.hpp"

#include <cmath>
#include <stdexcept>

namespace rissec {

HiStats HiStats::robust() {
    const double rho = 2.0 / kPi;
    return {rho, std::sqrt(1.0 - rho * rho)};
}

HiStats HiStats::ideal() { return {1.0, 0.0}; }

rmat phase_noise_second_moment(int m_ris) {
    const double off = 4.0 / (kPi * kPi);
    rmat g = rmat::Constant(m_ris, m_ris, off);
    g.diagonal().setOnes();
    return g;
}

rvec phase_noise_first_moment(int m_ris) {
    return rvec::Constant(m_ris, 2.0 / kPi);
}

EffectiveChannel effective_channel(const cvec& phi, const cvec& h_r, const cvec& h_b,
                                   const cmat& h_br, const HiStats& stats) {
    const int m = static_cast<int>(phi.size());
    const int n = static_cast<int>(h_b.size());
    if (h_r.size() != m || h_br.rows() != m || (m > 0 && h_br.cols() != n))
        throw std::invalid_argument("effective_channel: inconsistent dimensions");
    for (int i = 0; i < m; ++i)
        if (std::abs(std::abs(phi(i)) - 1.0) > 1e-9)
            throw std::invalid_argument("effective_channel: phase entries must have unit modulus");

    EffectiveChannel eff;
    eff.h_hat = h_b;
    if (m > 0) {
        // h_hat^H = rho_mean h_r^H diag(phi) H_br + h_b^H
        const cvec cascade_row = h_br.adjoint() * (phi.conjugate().cwiseProduct(h_r));
        eff.h_hat += stats.rho_mean * cascade_row;
        // h_mat^H = rho_spread diag(h_r^H) diag(phi) H_br, stored as its adjoint
        eff.h_mat = stats.rho_spread *
                    (h_br.adjoint() * (phi.conjugate().cwiseProduct(h_r)).asDiagonal());
    } else {
        eff.h_mat.resize(n, 0);
    }
    eff.stacked.resize(n, m + 1);
    eff.stacked.col(0) = eff.h_hat;
    if (m > 0) eff.stacked.rightCols(m) = eff.h_mat;
    return eff;
}

EffectiveChannel effective_channel_user(const cvec& phi, const ChannelSet& ch, int k,
                                        const HiStats& stats) {
    return effective_channel(phi, ch.h_ru.at(static_cast<std::size_t>(k)),
                             ch.h_bu.at(static_cast<std::size_t>(k)), ch.h_br, stats);
}

EffectiveChannel effective_channel_eve(const cvec& phi, const ChannelSet& ch,
                                       const HiStats& stats) {
    return effective_channel(phi, ch.h_re, ch.h_be, ch.h_br, stats);
}

cvec ideal_effective_channel(const cvec& phi, const cvec& h_r, const cvec& h_b,
                             const cmat& h_br) {
    return effective_channel(phi, h_r, h_b, h_br, HiStats::ideal()).h_hat;
}

EffSet make_eff_set(const cvec& phi, const ChannelSet& ch, const HiStats& stats) {
    EffSet effs;
    effs.user.reserve(ch.h_bu.size());
    for (std::size_t k = 0; k < ch.h_bu.size(); ++k)
        effs.user.push_back(effective_channel_user(phi, ch, static_cast<int>(k), stats));
    effs.eve = effective_channel_eve(phi, ch, stats);
    return effs;
}

} // namespace rissec
