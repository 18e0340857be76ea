// SPDX-License-Identifier: Apache-2.0

#include "rissec/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "rissec/rng.hpp"

namespace rissec {

double path_loss_db(double d_m, double exponent) {
    if (!(d_m >= 1.0))
        throw std::domain_error("path_loss_db: distance below 1 m reference");
    return -30.0 - 10.0 * exponent * std::log10(d_m);
}

double path_loss_linear(double d_m, double exponent) {
    return std::pow(10.0, path_loss_db(d_m, exponent) / 10.0);
}

namespace {

// e^{j pi n s} steering entries for half-wavelength element spacing.
cvec steering(int n, double sin_az) {
    cvec a(n);
    for (int i = 0; i < n; ++i) {
        const double phase = kPi * i * sin_az;
        a(i) = cx(std::cos(phase), std::sin(phase));
    }
    return a;
}

double sin_azimuth(const Vec3& from, const Vec3& to) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double rho = std::sqrt(dx * dx + dy * dy);
    if (!(rho > 0))
        throw std::invalid_argument("los_component: endpoints share horizontal coordinates");
    return dy / rho;
}

cvec draw_cn(PhiloxRng& rng, int n, double var) {
    cvec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cnormal(var);
    return v;
}

} // namespace

cmat los_component(const Vec3& tx, const Vec3& rx, int n_tx, int n_rx) {
    const cvec a_rx = steering(n_rx, sin_azimuth(rx, tx));
    const cvec a_tx = steering(n_tx, sin_azimuth(tx, rx));
    return a_rx * a_tx.adjoint();
}

namespace {

std::vector<Vec3> draw_positions(PhiloxRng& rng, const SystemConfig& config) {
    const Geometry& g = config.geometry;
    std::vector<Vec3> users(static_cast<std::size_t>(config.k_users));
    for (auto& pos : users) {
        pos = g.user_center;
        pos.x += (rng.uniform01() - 0.5) * g.user_area_side;
        pos.y += (rng.uniform01() - 0.5) * g.user_area_side;
    }
    return users;
}

ChannelSet draw_links(PhiloxRng& rng, const SystemConfig& config,
                      const std::vector<Vec3>& users) {
    const int n = config.n_tx, m = config.m_ris;
    const int k = config.k_users;
    const Geometry& g = config.geometry;
    if (users.size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("generate_channels: one position per user required");

    ChannelSet ch;
    ch.h_bu.reserve(static_cast<std::size_t>(k));
    for (const auto& pos : users) {
        const double pl = path_loss_linear(distance(g.bs, pos), g.alpha_bu);
        ch.h_bu.push_back(std::sqrt(pl) * draw_cn(rng, n, 1.0));
    }
    {
        const double pl = path_loss_linear(distance(g.bs, g.eve), g.alpha_be);
        ch.h_be = std::sqrt(pl) * draw_cn(rng, n, 1.0);
    }

    const double rice = config.rician_k;
    const double los_w = std::sqrt(rice / (rice + 1.0));
    const double nlos_w = std::sqrt(1.0 / (rice + 1.0));

    if (m > 0) {
        const double pl = path_loss_linear(distance(g.bs, g.ris), g.alpha_br);
        cmat nlos(m, n);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) nlos(r, c) = rng.cnormal(1.0);
        ch.h_br = std::sqrt(pl) *
                  (los_w * los_component(g.bs, g.ris, n, m) + nlos_w * nlos);
    } else {
        ch.h_br.resize(0, n);
    }

    ch.h_ru.reserve(static_cast<std::size_t>(k));
    for (const auto& pos : users) {
        if (m > 0) {
            const double pl = path_loss_linear(distance(g.ris, pos), g.alpha_ru);
            const cvec los = los_component(g.ris, pos, m, 1).adjoint();
            ch.h_ru.push_back(std::sqrt(pl) * (los_w * los + nlos_w * draw_cn(rng, m, 1.0)));
        } else {
            ch.h_ru.emplace_back(cvec(0));
        }
    }
    if (m > 0) {
        const double pl = path_loss_linear(distance(g.ris, g.eve), g.alpha_re);
        const cvec los = los_component(g.ris, g.eve, m, 1).adjoint();
        ch.h_re = std::sqrt(pl) * (los_w * los + nlos_w * draw_cn(rng, m, 1.0));
    } else {
        ch.h_re.resize(0);
    }
    return ch;
}

} // namespace

std::vector<Vec3> draw_user_positions(const SystemConfig& config, std::uint64_t seed,
                                      std::uint64_t stream) {
    PhiloxRng rng(seed, stream);
    return draw_positions(rng, config);
}

ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed,
                             std::uint64_t stream) {
    PhiloxRng rng(seed, stream);
    const std::vector<Vec3> users = draw_positions(rng, config);
    return draw_links(rng, config, users);
}

ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed,
                             std::uint64_t stream,
                             const std::vector<Vec3>& positions) {
    PhiloxRng rng(seed, stream);
    return draw_links(rng, config, positions);
}

} // namespace rissec
