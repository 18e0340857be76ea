// SPDX-License-Identifier: Apache-2.0
//
// System configuration: deployment geometry, link budgets, impairment
// factors and optimizer parameters.  Noise powers are derived once from the
// spectral density and bandwidth at validation time and stored in watts.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rissec/types.hpp"

namespace rissec {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

double distance(const Vec3& a, const Vec3& b);

struct Geometry {
    Vec3 bs{0.0, 0.0, 30.0};
    Vec3 ris{50.0, 0.0, 10.0};
    Vec3 user_center{300.0, 10.0, 1.5};
    Vec3 eve{300.0, 10.0, 1.5};
    double user_area_side = 10.0; // users drop uniformly in this square (m)

    double alpha_br = 2.0; // BS-RIS path-loss exponent
    double alpha_ru = 2.0; // RIS-user
    double alpha_re = 2.0; // RIS-eavesdropper
    double alpha_bu = 4.0; // BS-user
    double alpha_be = 4.0; // BS-eavesdropper
};

struct CcpParams {
    double lambda_init = 1e-3; // initial slack penalty
    double gamma = 5.0;        // penalty escalation factor
    double lambda_max = 1e4;
    double eps_phase = 1e-4;   // L1 change of phase vector
    double eps_slack = 1e-4;   // L1 norm of slack vector
    int t_max = 30;
};

struct SystemConfig {
    int n_tx = 4;     // BS antennas
    int m_ris = 16;   // RIS elements
    int k_users = 3;  // users

    double p_max = 1.0;     // transmit power budget (W)
    double kappa_t = 0.01;  // transmitter distortion factor
    double kappa_r = 0.01;  // receiver distortion factor (all receivers)

    double bandwidth_hz = 10e6;
    double noise_density_dbm_hz = -174.0;
    double noise_user = 0.0; // derived (W)
    double noise_eve = 0.0;  // derived (W)

    std::vector<double> weights; // per-user rate weights, defaults to ones

    Geometry geometry;
    double rician_k = 10.0; // Rician factor of all RIS links

    // Optimizer parameters shared by both algorithms.
    double zeta = 1.25;     // initial smoothing of the soft minimum
    double iota = 1.02;     // smoothing growth exponent per outer iteration
    double zeta_max = 500.0;
    double epsilon = 1e-5;  // relative-change stopping threshold
    int n_max = 500;        // outer iteration cap

    CcpParams ccp;

    bool twobit_refit = true;   // re-optimize precoder after quantizing phases
    bool record_timing = true;  // write wall-clock times into result rows
    bool redraw_users = true;   // fresh user positions each trial

    double p_dbm() const;

    // Fills derived fields and checks ranges; throws ConfigError.
    void validate();
};

SystemConfig default_config();

} // namespace rissec
