// SPDX-License-Identifier: Apache-2.0
//
// Closed quadratic forms of the weighted rate bound in each block.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "rissec/quadform.hpp"
#include "rissec/rng.hpp"
#include "rissec/scenario.hpp"

using namespace rissec;

namespace {

SystemConfig demo_config() {
    SystemConfig cfg = default_config();
    cfg.n_tx = 3;
    cfg.m_ris = 4;
    cfg.k_users = 2;
    cfg.weights = {1.7, 0.6};
    cfg.validate();
    return cfg;
}

cmat random_precoder(PhiloxRng& rng, const SystemConfig& cfg, double frac) {
    cmat w(cfg.n_tx, cfg.k_users);
    for (int r = 0; r < w.rows(); ++r)
        for (int c = 0; c < w.cols(); ++c) w(r, c) = rng.cnormal(1.0);
    w *= std::sqrt(frac * cfg.p_max) / w.norm();
    return w;
}

cvec random_phases(PhiloxRng& rng, int m) {
    cvec phi(m);
    for (int i = 0; i < m; ++i) phi(i) = std::polar(1.0, 2 * kPi * rng.uniform01());
    return phi;
}

} // namespace

TEST_CASE("evaluation expands the scalar quadratic by hand") {
    QuadraticForm f;
    f.c_mat = cmat(1, 1);
    f.c_mat(0, 0) = 2.0;
    f.b_vec = cvec(1);
    f.b_vec(0) = cx(1, 1);
    f.c_scalar = 3.0;
    cvec x(1);
    x(0) = cx(0, 1);
    // -conj(i)*2*i + 2 Re{(1-i) i} + 3 = -2 + 2 + 3
    CHECK(evaluate(f, x) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("precoder forms reproduce the weighted bound at arbitrary precoders") {
    SystemConfig cfg = demo_config();
    PhiloxRng rng(81, rng_stream(kStreamTest, 5, 0));
    for (int inst = 0; inst < 10; ++inst) {
        ChannelSet ch = generate_channels(cfg, 600 + inst, rng_stream(kStreamChannels, 0, inst));
        BeamState st(random_precoder(rng, cfg, 1.0), random_phases(rng, cfg.m_ris), cfg.p_max);
        EffSet effs = make_eff_set(st.phi, ch);
        AuxState aux = make_aux(st, effs, cfg);
        update_all_aux(aux, st, effs, cfg);

        auto forms = w_quadratics(aux, effs, cfg);
        REQUIRE(forms.size() == 2);
        REQUIRE(forms[0].c_mat.rows() == cfg.n_tx * cfg.k_users);

        for (int rep = 0; rep < 3; ++rep) {
            BeamState other(random_precoder(rng, cfg, 0.5 + 0.5 * rng.uniform01()), st.phi,
                            cfg.p_max);
            for (int k = 0; k < cfg.k_users; ++k) {
                const double via_form = evaluate(forms[k], other.w_vec);
                const double direct = cfg.weights[static_cast<std::size_t>(k)] *
                                      lower_bound_rate(other, aux, effs, k, F3Mode::w_case, cfg);
                CHECK(via_form == doctest::Approx(direct).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("phase forms reproduce the weighted bound at arbitrary unit phases") {
    SystemConfig cfg = demo_config();
    PhiloxRng rng(83, rng_stream(kStreamTest, 5, 1));
    for (int inst = 0; inst < 10; ++inst) {
        ChannelSet ch = generate_channels(cfg, 700 + inst, rng_stream(kStreamChannels, 1, inst));
        BeamState st(random_precoder(rng, cfg, 1.0), random_phases(rng, cfg.m_ris), cfg.p_max);
        EffSet effs = make_eff_set(st.phi, ch);
        AuxState aux = make_aux(st, effs, cfg);
        update_all_aux(aux, st, effs, cfg);

        auto forms = phi_quadratics(st.w_mat, aux, ch, cfg);
        REQUIRE(forms.size() == 2);
        REQUIRE(forms[0].c_mat.rows() == cfg.m_ris);

        for (int rep = 0; rep < 3; ++rep) {
            cvec phi2 = random_phases(rng, cfg.m_ris);
            BeamState other(st.w_mat, phi2, cfg.p_max);
            EffSet effs2 = make_eff_set(phi2, ch);
            for (int k = 0; k < cfg.k_users; ++k) {
                const double via_form = evaluate(forms[k], phi2);
                const double direct =
                    cfg.weights[static_cast<std::size_t>(k)] *
                    lower_bound_rate(other, aux, effs2, k, F3Mode::phi_case, cfg);
                CHECK(via_form == doctest::Approx(direct).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("form matrices are Hermitian positive semidefinite") {
    SystemConfig cfg = demo_config();
    PhiloxRng rng(89, rng_stream(kStreamTest, 5, 2));
    ChannelSet ch = generate_channels(cfg, 800, rng_stream(kStreamChannels, 2, 0));
    BeamState st(random_precoder(rng, cfg, 1.0), random_phases(rng, cfg.m_ris), cfg.p_max);
    EffSet effs = make_eff_set(st.phi, ch);
    AuxState aux = make_aux(st, effs, cfg);
    update_all_aux(aux, st, effs, cfg);

    auto check_psd = [](const QuadraticForm& f) {
        CHECK((f.c_mat - f.c_mat.adjoint()).norm() < 1e-10 * std::max(1.0, f.c_mat.norm()));
        Eigen::SelfAdjointEigenSolver<cmat> es(f.c_mat);
        CHECK(es.eigenvalues().minCoeff() > -1e-9 * std::max(1.0, f.c_mat.norm()));
    };
    for (const auto& f : w_quadratics(aux, effs, cfg)) check_psd(f);
    for (const auto& f : phi_quadratics(st.w_mat, aux, ch, cfg)) check_psd(f);
}
