// SPDX-License-Identifier: Apache-2.0
//
// Closed quadratic forms of the per-user rate lower bound in each block
// variable, with the other block and all auxiliary variables held fixed:
//   r(x) = -x^H C x + 2 Re{b^H x} + c,  C Hermitian PSD.
// For the precoder block x is the stacked precoder (length N*K); for the
// phase block x is the phase vector (length M).  The user weight is folded
// into all three coefficients, so r equals weight_k times the fp-module
// bound everywhere, not just at the expansion point.

#pragma once

#include "rissec/fp.hpp"

namespace rissec {

struct QuadraticForm {
    cmat c_mat;
    cvec b_vec;
    double c_scalar = 0.0;
};

// r(x) for complex x of matching dimension.
double evaluate(const QuadraticForm& form, const cvec& x);

// Coefficients over the stacked precoder for user k.
QuadraticForm w_quadratic(int k, const AuxState& aux, const EffSet& effs,
                          const SystemConfig& config);

// Coefficients over the phase vector for user k at precoder w_mat.  The
// rho factors of stats select the robust or the phase-noise-free cascade
// statistics and must match the ones used to build effs and aux.
QuadraticForm phi_quadratic(int k, const cmat& w_mat, const AuxState& aux,
                            const ChannelSet& ch, const SystemConfig& config,
                            const HiStats& stats = HiStats::robust());

std::vector<QuadraticForm> w_quadratics(const AuxState& aux, const EffSet& effs,
                                        const SystemConfig& config);
std::vector<QuadraticForm> phi_quadratics(const cmat& w_mat, const AuxState& aux,
                                          const ChannelSet& ch, const SystemConfig& config,
                                          const HiStats& stats = HiStats::robust());

} // namespace rissec
