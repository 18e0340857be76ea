// SPDX-License-Identifier: Apache-2.0

#include "rissec/quadform.hpp"

#include <cmath>

namespace rissec {

double evaluate(const QuadraticForm& form, const cvec& x) {
    const double quad = (x.adjoint() * form.c_mat * x)(0).real();
    const double lin = form.b_vec.size() > 0 ? form.b_vec.dot(x).real() : 0.0;
    return -quad + 2.0 * lin + form.c_scalar;
}

QuadraticForm w_quadratic(int k, const AuxState& aux, const EffSet& effs,
                          const SystemConfig& config) {
    const int n = config.n_tx, k_users = config.k_users;
    const int dim = n * k_users;
    const double weight = config.weights[static_cast<std::size_t>(k)];
    const EffectiveChannel& eff_k = effs.user[static_cast<std::size_t>(k)];
    const EffectiveChannel& eff_e = effs.eve;
    const cvec& u = aux.u[static_cast<std::size_t>(k)];
    const double v = aux.v(k), d = aux.d(k), p = aux.p;
    const double u_norm2 = u.squaredNorm();

    QuadraticForm form;
    form.c_mat = cmat::Zero(dim, dim);
    form.b_vec = cvec::Zero(dim);

    // Signal part: per-user diagonal block of the loaded user Gram.
    const cmat gram_k = eff_k.stacked * eff_k.stacked.adjoint();
    cmat c1 = (1.0 + config.kappa_r) * u_norm2 * gram_k;
    c1.diagonal() += config.kappa_t * (1.0 + config.kappa_r) * u_norm2 *
                     gram_k.diagonal();
    for (int i = 0; i < k_users; ++i)
        form.c_mat.block(i * n, i * n, n, n) += c1;

    // Leakage part: eavesdropper Gram on block (k, k) plus its diagonal
    // loading on every block.
    const cmat gram_e = eff_e.stacked * eff_e.stacked.adjoint();
    const double d_scale = d / config.noise_eve;
    form.c_mat.block(k * n, k * n, n, n) += d_scale * gram_e;
    for (int i = 0; i < k_users; ++i)
        form.c_mat.block(i * n, i * n, n, n).diagonal() +=
            (d_scale * config.kappa_t) * gram_e.diagonal();

    // Distortion-floor part: diagonal over the stacked precoder.
    const rvec l = f3_l_diag(eff_e, config.kappa_t, k_users);
    const double q_norm2 = aux.q_w.squaredNorm();
    form.c_mat.diagonal() += (p * q_norm2 * l.cwiseProduct(l)).cast<cx>();

    form.b_vec.segment(k * n, n) = std::sqrt(1.0 + v) * (eff_k.stacked * u);
    form.b_vec += p * aux.q_w.cwiseProduct(l.cast<cx>());

    form.c_scalar = (std::log1p(v) - v - config.noise_user * u_norm2) +
                    (std::log(d) + 1.0 - d) +
                    (-p * q_norm2 * config.noise_eve - p + std::log(p) + 1.0);

    form.c_mat *= weight;
    form.b_vec *= weight;
    form.c_scalar *= weight;
    form.c_mat = 0.5 * (form.c_mat + form.c_mat.adjoint()).eval();
    return form;
}

namespace {

// rho1^2 (h h^H) o G^T + rho2^2 diag(|h|^2) o G^T for PSD G.
cmat hadamard_pair(const cvec& h, const cmat& g, double rho1, double rho2) {
    const cmat outer = h * h.adjoint();
    cmat c = (rho1 * rho1) * outer.cwiseProduct(g.transpose());
    c.diagonal() += (rho2 * rho2) * h.cwiseAbs2().cwiseProduct(g.diagonal().real()).cast<cx>();
    return c;
}

} // namespace

QuadraticForm phi_quadratic(int k, const cmat& w_mat, const AuxState& aux,
                            const ChannelSet& ch, const SystemConfig& config,
                            const HiStats& stats) {
    const int m = config.m_ris;
    const double weight = config.weights[static_cast<std::size_t>(k)];
    const double rho1 = stats.rho_mean, rho2 = stats.rho_spread;
    const cvec& h_ru = ch.h_ru[static_cast<std::size_t>(k)];
    const cvec& h_bu = ch.h_bu[static_cast<std::size_t>(k)];
    const cvec& h_re = ch.h_re;
    const cvec& h_be = ch.h_be;
    const cmat& h_br = ch.h_br;
    const cvec& u = aux.u[static_cast<std::size_t>(k)];
    const double v = aux.v(k), d = aux.d(k), p = aux.p;
    const double u_norm2 = u.squaredNorm();
    const double sq_v = std::sqrt(1.0 + v);
    const cx u0 = u(0);

    const rvec ups = distortion_covariance(w_mat, config.kappa_t);
    const rvec w_rows = w_mat.rowwise().squaredNorm();

    QuadraticForm form;
    form.c_mat = cmat::Zero(m, m);
    form.b_vec = cvec::Zero(m);

    // Signal part.
    cmat a1 = (1.0 + config.kappa_r) * u_norm2 * (w_mat * w_mat.adjoint());
    a1.diagonal() += ((1.0 + config.kappa_r) * u_norm2 * config.kappa_t) *
                     w_rows.cast<cx>();
    double c1 = std::log1p(v) - v - config.noise_user * u_norm2 -
                (h_bu.adjoint() * a1 * h_bu)(0).real() +
                2.0 * sq_v * (std::conj(u0) * (h_bu.adjoint() * w_mat.col(k))(0)).real();
    if (m > 0) {
        const cmat g1 = h_br * a1 * h_br.adjoint();
        form.c_mat += hadamard_pair(h_ru, g1, rho1, rho2);
        const cvec bw = h_br * w_mat.col(k);
        const cvec u_tail = u.tail(m);
        cvec lin1(m);
        for (int i = 0; i < m; ++i)
            lin1(i) = (rho1 * u0 + rho2 * u_tail(i)) * h_ru(i) * std::conj(bw(i));
        const cvec g1_hbu = h_br * (a1 * h_bu);
        cvec b1(m);
        for (int i = 0; i < m; ++i) b1(i) = rho1 * h_ru(i) * std::conj(g1_hbu(i));
        form.b_vec += sq_v * lin1 - b1;
    }

    // Leakage part (enters the linear coefficient with a negative sign).
    cmat a2 = w_mat.col(k) * w_mat.col(k).adjoint();
    a2.diagonal() += ups.cast<cx>();
    const double d_scale = d / config.noise_eve;
    double c2 = std::log(d) + 1.0 - d - d_scale * (h_be.adjoint() * a2 * h_be)(0).real();
    if (m > 0) {
        const cmat g2 = h_br * a2 * h_br.adjoint();
        form.c_mat += d_scale * hadamard_pair(h_re, g2, rho1, rho2);
        const cvec g2_hbe = h_br * (a2 * h_be);
        for (int i = 0; i < m; ++i)
            form.b_vec(i) -= d_scale * rho1 * h_re(i) * std::conj(g2_hbe(i));
    }

    // Distortion-floor part.
    const double q_norm2 = aux.q_phi.squaredNorm();
    const cvec j = ups.cwiseSqrt().cast<cx>();
    const cvec jq = j.cwiseProduct(aux.q_phi.col(0)); // J q_hat
    double c3 = -p * q_norm2 * (h_be.cwiseAbs2().dot(ups) + config.noise_eve) +
                2.0 * p * h_be.dot(jq).real() - p + std::log(p) + 1.0;
    if (m > 0) {
        cmat g3 = h_br * ups.cast<cx>().asDiagonal() * h_br.adjoint();
        form.c_mat += (p * q_norm2) * hadamard_pair(h_re, g3, rho1, rho2);
        const cvec g3_hbe = h_br * ups.cast<cx>().cwiseProduct(h_be);
        const cvec br_jq = h_br * jq;
        const cmat br_jq_mat = h_br * (j.asDiagonal() * aux.q_phi.rightCols(m));
        for (int i = 0; i < m; ++i) {
            const cx a3 = rho1 * std::conj(br_jq(i)) * h_re(i) +
                          rho2 * std::conj(br_jq_mat(i, i)) * h_re(i);
            const cx b3 = rho1 * h_re(i) * std::conj(g3_hbe(i));
            form.b_vec(i) += p * a3 - p * q_norm2 * b3;
        }
    }

    form.c_scalar = c1 + c2 + c3;
    form.c_mat *= weight;
    form.b_vec *= weight;
    form.c_scalar *= weight;
    if (m > 0) form.c_mat = 0.5 * (form.c_mat + form.c_mat.adjoint()).eval();
    return form;
}

std::vector<QuadraticForm> w_quadratics(const AuxState& aux, const EffSet& effs,
                                        const SystemConfig& config) {
    std::vector<QuadraticForm> forms;
    forms.reserve(static_cast<std::size_t>(config.k_users));
    for (int k = 0; k < config.k_users; ++k)
        forms.push_back(w_quadratic(k, aux, effs, config));
    return forms;
}

std::vector<QuadraticForm> phi_quadratics(const cmat& w_mat, const AuxState& aux,
                                          const ChannelSet& ch, const SystemConfig& config,
                                          const HiStats& stats) {
    std::vector<QuadraticForm> forms;
    forms.reserve(static_cast<std::size_t>(config.k_users));
    for (int k = 0; k < config.k_users; ++k)
        forms.push_back(phi_quadratic(k, w_mat, aux, ch, config, stats));
    return forms;
}

} // namespace rissec
