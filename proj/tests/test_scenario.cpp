// SPDX-License-Identifier: Apache-2.0
//
// Geometry, path loss, steering structure and the seeded channel draws.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "rissec/rng.hpp"
#include "rissec/scenario.hpp"

using namespace rissec;

namespace {

SystemConfig small_config() {
    SystemConfig cfg = default_config();
    cfg.n_tx = 4;
    cfg.m_ris = 8;
    cfg.k_users = 2;
    cfg.weights.clear();
    cfg.validate();
    return cfg;
}

} // namespace

TEST_CASE("path loss pins the reference intercept and the log slope") {
    CHECK(path_loss_db(1.0, 2.0) == doctest::Approx(-30.0).epsilon(1e-12));
    CHECK(path_loss_db(1.0, 4.0) == doctest::Approx(-30.0).epsilon(1e-12));
    CHECK(path_loss_db(100.0, 2.0) == doctest::Approx(-70.0).epsilon(1e-12));
    CHECK(path_loss_db(300.0, 4.0) ==
          doctest::Approx(-30.0 - 40.0 * std::log10(300.0)).epsilon(1e-12));
    CHECK(path_loss_linear(100.0, 2.0) == doctest::Approx(1e-7).epsilon(1e-12));
}

TEST_CASE("distances below the one metre reference are rejected") {
    CHECK_THROWS_AS(path_loss_db(0.5, 2.0), std::domain_error);
    CHECK_THROWS_AS(path_loss_linear(0.999, 4.0), std::domain_error);
}

TEST_CASE("a link along the x axis is boresight for both arrays") {
    cmat a = los_component({0, 0, 30}, {100, 0, 30}, 3, 2);
    REQUIRE(a.rows() == 2);
    REQUIRE(a.cols() == 3);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) {
            CHECK(a(r, c).real() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(a(r, c).imag()) < 1e-12);
        }
}

TEST_CASE("a link along the y axis alternates steering signs") {
    cmat a = los_component({0, 0, 10}, {0, 50, 10}, 2, 2);
    CHECK(a(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a(1, 0).real() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(a(1, 1).real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("line-of-sight entries have unit modulus and rank one structure") {
    cmat a = los_component({3, -7, 25}, {210, 40, 1.5}, 4, 3);
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            CHECK(std::abs(a(r, c)) == doctest::Approx(1.0).epsilon(1e-12));
    // every 2x2 minor of a rank-one matrix vanishes
    cx minor = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    CHECK(std::abs(minor) < 1e-12);
}

TEST_CASE("vertically stacked endpoints have no azimuth direction") {
    CHECK_THROWS_AS(los_component({5, 5, 30}, {5, 5, 2}, 2, 2), std::invalid_argument);
}

TEST_CASE("user positions stay inside the configured square") {
    SystemConfig cfg = small_config();
    auto pos = draw_user_positions(cfg, 3, rng_stream(kStreamPositions, 0, 0));
    REQUIRE(pos.size() == 2);
    for (const auto& p : pos) {
        CHECK(std::abs(p.x - cfg.geometry.user_center.x) <= cfg.geometry.user_area_side / 2);
        CHECK(std::abs(p.y - cfg.geometry.user_center.y) <= cfg.geometry.user_area_side / 2);
        CHECK(p.z == cfg.geometry.user_center.z);
    }
    auto again = draw_user_positions(cfg, 3, rng_stream(kStreamPositions, 0, 0));
    CHECK(pos[0].x == again[0].x);
    CHECK(pos[1].y == again[1].y);
    auto other = draw_user_positions(cfg, 3, rng_stream(kStreamPositions, 0, 1));
    CHECK(pos[0].x != other[0].x);
}

TEST_CASE("channel draws have the documented shapes") {
    SystemConfig cfg = small_config();
    ChannelSet ch = generate_channels(cfg, 1, rng_stream(kStreamChannels, 0, 0));
    REQUIRE(ch.h_bu.size() == 2);
    CHECK(ch.h_bu[0].size() == 4);
    CHECK(ch.h_be.size() == 4);
    CHECK(ch.h_br.rows() == 8);
    CHECK(ch.h_br.cols() == 4);
    REQUIRE(ch.h_ru.size() == 2);
    CHECK(ch.h_ru[1].size() == 8);
    CHECK(ch.h_re.size() == 8);
}

TEST_CASE("a zero element count leaves only the direct links") {
    SystemConfig cfg = small_config();
    cfg.m_ris = 0;
    cfg.validate();
    ChannelSet ch = generate_channels(cfg, 1, 0);
    CHECK(ch.h_br.rows() == 0);
    CHECK(ch.h_ru[0].size() == 0);
    CHECK(ch.h_re.size() == 0);
    CHECK(ch.h_bu[0].size() == 4);
}

TEST_CASE("same seed and stream reproduce the draw, different streams do not") {
    SystemConfig cfg = small_config();
    ChannelSet a = generate_channels(cfg, 17, rng_stream(kStreamChannels, 1, 2));
    ChannelSet b = generate_channels(cfg, 17, rng_stream(kStreamChannels, 1, 2));
    ChannelSet c = generate_channels(cfg, 17, rng_stream(kStreamChannels, 1, 3));
    CHECK((a.h_br - b.h_br).norm() == 0.0);
    CHECK((a.h_bu[0] - b.h_bu[0]).norm() == 0.0);
    CHECK((a.h_re - b.h_re).norm() == 0.0);
    CHECK((a.h_br - c.h_br).norm() > 0.0);
}

TEST_CASE("fading scales match the link budget statistics") {
    SystemConfig cfg = small_config();
    cfg.geometry.user_area_side = 0.0; // pin users to the centre
    cfg.validate();
    const Geometry& g = cfg.geometry;

    const double pl_bu = path_loss_linear(distance(g.bs, g.user_center), g.alpha_bu);
    const double pl_br = path_loss_linear(distance(g.bs, g.ris), g.alpha_br);
    const double rice = cfg.rician_k;

    const int trials = 2500;
    double pow_bu = 0, pow_br = 0;
    cx mean_br_00 = 0, mean_bu_0 = 0;
    for (int t = 0; t < trials; ++t) {
        ChannelSet ch = generate_channels(cfg, 1000, rng_stream(kStreamChannels, 0, t));
        for (int k = 0; k < cfg.k_users; ++k) pow_bu += ch.h_bu[k].squaredNorm();
        pow_br += ch.h_br.squaredNorm();
        mean_br_00 += ch.h_br(0, 0);
        mean_bu_0 += ch.h_bu[0](0);
    }
    pow_bu /= trials * cfg.k_users * cfg.n_tx;
    pow_br /= trials * cfg.m_ris * cfg.n_tx;
    mean_br_00 /= trials;
    mean_bu_0 /= trials;

    // expected squared magnitude equals the linear path loss on every link
    CHECK(pow_bu == doctest::Approx(pl_bu).epsilon(0.05));
    CHECK(pow_br == doctest::Approx(pl_br).epsilon(0.05));
    // the Rician mean carries the line-of-sight fraction, the direct link none
    const double expect_mean = std::sqrt(pl_br * rice / (rice + 1.0));
    CHECK(mean_br_00.real() == doctest::Approx(expect_mean).epsilon(0.03));
    CHECK(std::abs(mean_br_00.imag()) < 0.05 * expect_mean);
    CHECK(std::abs(mean_bu_0) < 0.1 * std::sqrt(pl_bu));
}

TEST_CASE("pinned positions feed fading draws only") {
    SystemConfig cfg = small_config();
    std::vector<Vec3> pa = {{295, 5, 1.5}, {303, 12, 1.5}};
    std::vector<Vec3> pb = {{305, 15, 1.5}, {297, 8, 1.5}};
    ChannelSet a = generate_channels(cfg, 5, rng_stream(kStreamChannels, 0, 0), pa);
    ChannelSet b = generate_channels(cfg, 5, rng_stream(kStreamChannels, 0, 0), pb);
    // links that ignore user positions are untouched
    CHECK((a.h_br - b.h_br).norm() == 0.0);
    CHECK((a.h_be - b.h_be).norm() == 0.0);
    // direct links reuse the same normal draws, rescaled by the new distance
    cx ratio = b.h_bu[0](0) / a.h_bu[0](0);
    CHECK(std::abs(ratio.imag()) < 1e-12);
    CHECK((b.h_bu[0] - ratio * a.h_bu[0]).norm() < 1e-12 * a.h_bu[0].norm());
    // repeatable
    ChannelSet a2 = generate_channels(cfg, 5, rng_stream(kStreamChannels, 0, 0), pa);
    CHECK((a.h_ru[1] - a2.h_ru[1]).norm() == 0.0);
}

TEST_CASE("position count must match the user count") {
    SystemConfig cfg = small_config();
    std::vector<Vec3> one = {{300, 10, 1.5}};
    CHECK_THROWS_AS(generate_channels(cfg, 1, 0, one), std::invalid_argument);
}
