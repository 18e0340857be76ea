// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rissec/config.hpp"
#include "rissec/himodel.hpp"
#include "rissec/quadform.hpp"
#include "rissec/scenario.hpp"
#include "rissec/trace.hpp"
#include "rissec/types.hpp"

namespace rissec {

// a * x + b lies in the second-order cone of dimension a.rows():
// first coordinate >= Euclidean norm of the rest.
struct SocConstraint {
    rmat a;
    rvec b;
};

// minimize objective . x
// subject to nonneg_a * x + nonneg_b >= 0 componentwise and every cone
// constraint.  All data real; complex models are realified by the caller.
struct ConicProblem {
    rvec objective;
    std::vector<SocConstraint> cones;
    rmat nonneg_a; // may have zero rows
    rvec nonneg_b;
    int var_dim = 0;
};

enum class SolveStatus { optimal, max_iter, infeasible };

struct ConicSolution {
    rvec x;
    double objective_value = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::max_iter;
};

// Homogeneous self-dual interior point with Nesterov-Todd scaling and a
// predictor-corrector step.  Tolerance 1e-8 on relative primal/dual
// residuals and duality gap, at most 100 iterations.  Deterministic.
ConicSolution solve_socp(const ConicProblem& problem);

// [[Re M, -Im M], [Im M, Re M]] block matrix of a complex matrix.
rmat realify(const cmat& m);

// [Re v; Im v] stacking of a complex vector.
rvec realify_vec(const cvec& v);

// Real factor F with F^T F = realify(C) for Hermitian PSD C, computed by
// eigendecomposition.  Eigenvalues in [-1e-10 * scale, 0) are clipped to
// zero; more negative ones throw std::invalid_argument.
rmat psd_sqrt_factor(const cmat& hermitian);

// min_k of the quadratic forms at x.
double evaluate_min(const std::vector<QuadraticForm>& forms, const cvec& x);

struct WSubproblemResult {
    cvec w;
    double bound = 0.0; // min_k form value at w
    bool fallback = false;
};

// Epigraph max-min over the power ball: maximize delta subject to
// r_k(w) >= delta for all k and |w|^2 <= p_max.  Never degrades the
// incumbent: if the solver fails or the candidate scores below the
// incumbent under the exact forms, the incumbent is returned and the
// fallback flag is set.
WSubproblemResult solve_w_subproblem(const std::vector<QuadraticForm>& forms,
                                     double p_max, const cvec& incumbent);

struct PhiSubproblemResult {
    cvec phi;
    double bound = 0.0; // min_k form value at phi
    bool fallback = false;
    int iterations = 0;
    double slack_l1 = 0.0;
    double lambda_final = 0.0;
};

// Penalty convex-concave loop for the phase block.  Each pass solves the
// convexified epigraph problem with per-element modulus slacks, linearizing
// |phi_m|^2 >= 1 - b_m at the previous iterate, then escalates the penalty.
// Stops once the iterate movement and the slack l1 norm fall below the
// params thresholds.  Returns the best unit-modulus renormalized iterate,
// never below the incumbent under the exact forms.
PhiSubproblemResult solve_phi_subproblem_ccp(const std::vector<QuadraticForm>& forms,
                                             const cvec& phi_init,
                                             const CcpParams& params);

struct SocpOptions {
    HiStats stats = HiStats::robust();
    BlockObserver observer;
};

// Alternating optimization: refresh auxiliaries, solve the precoder
// epigraph problem, refresh auxiliaries again, run the phase penalty loop.
// Terminates on the relative change of the precoder subproblem objective
// or after config.n_max iterations.
BcdResult bcd_socp(const SystemConfig& config, const ChannelSet& channels,
                   const BeamState& init, const SocpOptions& options = {});

} // namespace rissec
