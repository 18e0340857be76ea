// SPDX-License-Identifier: Apache-2.0

#include "rissec/config.hpp"

#include <cmath>

namespace rissec {

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double SystemConfig::p_dbm() const {
    return 10.0 * std::log10(p_max * 1e3);
}

void SystemConfig::validate() {
    if (n_tx < 1) throw ConfigError("n_tx must be >= 1");
    if (m_ris < 0) throw ConfigError("m_ris must be >= 0");
    if (k_users < 1) throw ConfigError("k_users must be >= 1");
    if (!(p_max > 0)) throw ConfigError("p_max must be positive");
    if (kappa_t < 0 || kappa_r < 0) throw ConfigError("impairment factors must be >= 0");
    if (!(bandwidth_hz > 0)) throw ConfigError("bandwidth_hz must be positive");
    if (rician_k < 0) throw ConfigError("rician_k must be >= 0");
    if (!(zeta > 0) || !(zeta_max > 0) || iota < 1.0)
        throw ConfigError("smoothing parameters must satisfy zeta > 0, zeta_max > 0, iota >= 1");
    if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    if (!(ccp.lambda_init > 0) || !(ccp.gamma > 1.0) || !(ccp.lambda_max >= ccp.lambda_init))
        throw ConfigError("penalty parameters must satisfy lambda_init > 0, gamma > 1, lambda_max >= lambda_init");
    if (!(ccp.eps_phase > 0) || !(ccp.eps_slack > 0) || ccp.t_max < 1)
        throw ConfigError("penalty stopping parameters must be positive");
    if (geometry.user_area_side < 0) throw ConfigError("user_area_side must be >= 0");

    if (weights.empty()) weights.assign(static_cast<std::size_t>(k_users), 1.0);
    if (static_cast<int>(weights.size()) != k_users)
        throw ConfigError("weights must have one entry per user");
    for (double w : weights)
        if (!(w > 0)) throw ConfigError("weights must be positive");

    const double density_w_hz = std::pow(10.0, (noise_density_dbm_hz - 30.0) / 10.0);
    noise_user = density_w_hz * bandwidth_hz;
    noise_eve = density_w_hz * bandwidth_hz;
    if (!(noise_user > 0)) throw ConfigError("derived noise power must be positive");
}

SystemConfig default_config() {
    SystemConfig cfg;
    cfg.validate();
    return cfg;
}

} // namespace rissec
