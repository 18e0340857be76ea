// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "rissec/config.hpp"
#include "rissec/himodel.hpp"
#include "rissec/quadform.hpp"
#include "rissec/scenario.hpp"
#include "rissec/trace.hpp"
#include "rissec/types.hpp"

namespace rissec {

// -(1/zeta) ln sum_k exp(-zeta v_k), computed with a max shift.  Sandwiched
// between min(v) - ln(K)/zeta and min(v).
double smoothed_min(const rvec& values, double zeta);

// Softmin weights exp(-zeta v_k) / sum, nonnegative, summing to one.
rvec mm_weights(const rvec& values, double zeta);

// smoothed_min of the form values at x.
double smoothed_min_at(const std::vector<QuadraticForm>& forms, const cvec& x,
                       double zeta);

// Quadratic minorant of the smoothed min over the precoder block:
// alpha_bar |w|^2 + 2 Re(v_bar^H w) + c_bar, touching at the expansion point
// with matching gradient.
struct SurrogateW {
    cvec v_bar;
    double alpha_bar = 0.0; // <= 0
    double c_bar = 0.0;
};

// Same shape over the phase block.
struct SurrogatePhi {
    cvec v_bar;
    double beta_bar = 0.0; // <= 0
    double c_bar = 0.0;
};

SurrogateW surrogate_w_params(const std::vector<QuadraticForm>& forms,
                              const cvec& w_cur, double zeta, double p_max);
SurrogatePhi surrogate_phi_params(const std::vector<QuadraticForm>& forms,
                                  const cvec& phi_cur, double zeta);

double surrogate_value(const SurrogateW& surr, const cvec& w);
double surrogate_value(const SurrogatePhi& surr, const cvec& phi);

// Maximizer of the w surrogate on the power sphere: sqrt(P) v_bar / |v_bar|.
// A vanishing v_bar returns the current iterate.
cvec mm_w_step(const SurrogateW& surr, double p_max, const cvec& w_cur);

// Elementwise phase alignment with v_bar; zero entries keep the current phase.
cvec mm_phi_step(const SurrogatePhi& surr, const cvec& phi_cur);

// Largest eigenvalue of the Hermitian part of a, by shifted power iteration
// (tolerance 1e-8, at most 500 iterations, seeded start vector).
double power_iteration(const cmat& a);

using FixedPointMap = std::function<cvec(const cvec&)>;
using Projector = std::function<cvec(const cvec&)>;
using Objective = std::function<double(const cvec&)>;

// Squared-extrapolation acceleration of a fixed-point map with objective
// backtracking: never returns a point scoring below the twice-mapped
// iterate.  At most 20 step halvings.
cvec squarem_accelerate(const cvec& x_cur, const FixedPointMap& map,
                        const Projector& projector, const Objective& objective);

struct MmOptions {
    HiStats stats = HiStats::robust();
    bool phi_block = true; // false freezes the phases (random-phase baseline)
    BlockObserver observer;
};

// Surrogate-ascent loop: per iteration refresh auxiliaries, take an
// accelerated precoder step and an accelerated phase step against the
// smoothed-min objective, then sharpen the smoothing parameter.  Stops on
// the relative change of the true weighted minimum secrecy rate.
BcdResult bcd_mm(const SystemConfig& config, const ChannelSet& channels,
                 const BeamState& init, const MmOptions& options = {});

} // namespace rissec
