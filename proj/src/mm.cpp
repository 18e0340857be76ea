// SPDX-License-Identifier: Apache-2.0
#include "rissec/mm.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rissec/fp.hpp"
#include "rissec/rng.hpp"

namespace rissec {
namespace {

rvec form_values(const std::vector<QuadraticForm>& forms, const cvec& x) {
    rvec values(static_cast<int>(forms.size()));
    for (std::size_t k = 0; k < forms.size(); ++k)
        values(static_cast<int>(k)) = evaluate(forms[k], x);
    return values;
}

// Tiny relative inflation applied to power-iteration output so that the
// curvature bounds stay valid bounds despite the iteration converging to
// the largest eigenvalue from below.
double inflated(double lambda) { return lambda * (1.0 + 1e-9); }

} // namespace

double smoothed_min(const rvec& values, double zeta) {
    if (zeta <= 0.0) throw std::invalid_argument("zeta must be positive");
    const rvec y = -zeta * values;
    const double shift = y.maxCoeff();
    return -(shift + std::log((y.array() - shift).exp().sum())) / zeta;
}

rvec mm_weights(const rvec& values, double zeta) {
    if (zeta <= 0.0) throw std::invalid_argument("zeta must be positive");
    const rvec y = -zeta * values;
    const double shift = y.maxCoeff();
    rvec w = (y.array() - shift).exp();
    return w / w.sum();
}

double smoothed_min_at(const std::vector<QuadraticForm>& forms, const cvec& x,
                       double zeta) {
    return smoothed_min(form_values(forms, x), zeta);
}

SurrogateW surrogate_w_params(const std::vector<QuadraticForm>& forms,
                              const cvec& w_cur, double zeta, double p_max) {
    const rvec values = form_values(forms, w_cur);
    const rvec h = mm_weights(values, zeta);

    double max_trace = 0.0;
    double max_o = 0.0;
    for (const auto& form : forms) {
        max_trace = std::max(max_trace, form.c_mat.trace().real());
        const double o = p_max * form.c_mat.squaredNorm() +
                         form.b_vec.squaredNorm() +
                         2.0 * std::sqrt(p_max) * (form.c_mat * form.b_vec).norm();
        max_o = std::max(max_o, o);
    }
    SurrogateW surr;
    surr.alpha_bar = -max_trace - 2.0 * zeta * max_o;

    surr.v_bar = cvec::Zero(w_cur.size());
    for (std::size_t k = 0; k < forms.size(); ++k)
        surr.v_bar += h(static_cast<int>(k)) *
                      (forms[k].b_vec - forms[k].c_mat.adjoint() * w_cur);
    surr.v_bar -= surr.alpha_bar * w_cur;

    const double f_cur = smoothed_min(values, zeta);
    surr.c_bar = f_cur - surr.alpha_bar * w_cur.squaredNorm() -
                 2.0 * surr.v_bar.dot(w_cur).real();
    return surr;
}

SurrogatePhi surrogate_phi_params(const std::vector<QuadraticForm>& forms,
                                  const cvec& phi_cur, double zeta) {
    const rvec values = form_values(forms, phi_cur);
    const rvec h = mm_weights(values, zeta);
    const double m = static_cast<double>(phi_cur.size());

    double max_lam = 0.0;
    double max_o = 0.0;
    for (const auto& form : forms) {
        const double lam = inflated(power_iteration(form.c_mat));
        const double o = form.b_vec.squaredNorm() + m * lam * lam +
                         2.0 * (form.c_mat * form.b_vec).lpNorm<1>();
        max_lam = std::max(max_lam, lam);
        max_o = std::max(max_o, o);
    }
    SurrogatePhi surr;
    surr.beta_bar = -max_lam - 2.0 * zeta * max_o;

    surr.v_bar = cvec::Zero(phi_cur.size());
    for (std::size_t k = 0; k < forms.size(); ++k)
        surr.v_bar += h(static_cast<int>(k)) *
                      (forms[k].b_vec - forms[k].c_mat.adjoint() * phi_cur);
    surr.v_bar -= surr.beta_bar * phi_cur;

    const double f_cur = smoothed_min(values, zeta);
    surr.c_bar = f_cur - surr.beta_bar * phi_cur.squaredNorm() -
                 2.0 * surr.v_bar.dot(phi_cur).real();
    return surr;
}

double surrogate_value(const SurrogateW& surr, const cvec& w) {
    return surr.alpha_bar * w.squaredNorm() + 2.0 * surr.v_bar.dot(w).real() +
           surr.c_bar;
}

double surrogate_value(const SurrogatePhi& surr, const cvec& phi) {
    return surr.beta_bar * phi.squaredNorm() + 2.0 * surr.v_bar.dot(phi).real() +
           surr.c_bar;
}

cvec mm_w_step(const SurrogateW& surr, double p_max, const cvec& w_cur) {
    const double norm = surr.v_bar.norm();
    if (norm < 1e-150) return w_cur;
    return std::sqrt(p_max) / norm * surr.v_bar;
}

cvec mm_phi_step(const SurrogatePhi& surr, const cvec& phi_cur) {
    cvec phi(phi_cur.size());
    for (int i = 0; i < phi_cur.size(); ++i) {
        const double mag = std::abs(surr.v_bar(i));
        phi(i) = mag > 1e-150 ? surr.v_bar(i) / mag : phi_cur(i);
    }
    return phi;
}

double power_iteration(const cmat& a) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) return 0.0;
    const cmat herm = 0.5 * (a + a.adjoint());
    // Shift by the Frobenius norm so the dominant eigenvalue of the shifted
    // matrix is the largest (not the largest-magnitude) one.
    const double shift = herm.norm();
    if (shift == 0.0) return 0.0;

    PhiloxRng rng(0x9e3779b97f4a7c15ULL, 901);
    cvec x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.cnormal(1.0);
    x /= x.norm();

    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        cvec y = herm * x + shift * x;
        const double norm = y.norm();
        if (norm < 1e-300) return -shift;
        x = y / norm;
        const double next = (x.dot(herm * x)).real() + shift;
        if (std::abs(next - lambda) <= 1e-8 * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda - shift;
}

cvec squarem_accelerate(const cvec& x_cur, const FixedPointMap& map,
                        const Projector& projector, const Objective& objective) {
    const cvec x1 = map(x_cur);
    const cvec j1 = x1 - x_cur;
    if (j1.norm() < 1e-300) return x1;
    const cvec x2 = map(x1);
    const cvec j2 = (x2 - x1) - j1;
    if (j2.norm() < 1e-300) return x2;

    double alpha = -j1.norm() / j2.norm();
    const double f2 = objective(x2);
    for (int attempt = 0; attempt < 20; ++attempt) {
        const cvec cand = projector(x_cur - 2.0 * alpha * j1 + alpha * alpha * j2);
        if (objective(cand) >= f2) return cand;
        alpha = (alpha - 1.0) / 2.0;
    }
    return x2;
}

BcdResult bcd_mm(const SystemConfig& config, const ChannelSet& channels,
                 const BeamState& init, const MmOptions& options) {
    const int n = config.n_tx, k = config.k_users;
    const double p_max = config.p_max;
    BcdResult out;
    out.state = init;
    RunTrace& trace = out.trace;

    EffSet effs = make_eff_set(out.state.phi, channels, options.stats);
    AuxState aux = make_aux(out.state, effs, config);
    double zeta = config.zeta;
    double prev_true = wmsr(out.state, effs, config).value;

    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&]() {
        if (!config.record_timing) return 0.0;
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };
    auto require_finite = [](bool ok, const char* step, int iteration) {
        if (!ok)
            throw std::runtime_error("bcd_mm: non-finite value in the " +
                                     std::string(step) + " step at iteration " +
                                     std::to_string(iteration));
    };

    const bool use_phi = options.phi_block && config.m_ris > 0;
    int iter = 1;
    for (; iter <= config.n_max; ++iter) {
        update_all_aux(aux, out.state, effs, config);

        const auto w_forms = w_quadratics(aux, effs, config);
        auto objective_w = [&](const cvec& w) {
            return smoothed_min_at(w_forms, w, zeta);
        };
        auto map_w = [&](const cvec& w) {
            return mm_w_step(surrogate_w_params(w_forms, w, zeta, p_max), p_max, w);
        };
        auto project_w = [&](const cvec& w) -> cvec {
            const double norm2 = w.squaredNorm();
            if (norm2 < 1e-300) return w;
            return std::sqrt(p_max / norm2) * w;
        };
        const double before_w = objective_w(out.state.w_vec);
        const cvec w_new = squarem_accelerate(out.state.w_vec, map_w, project_w,
                                              objective_w);
        require_finite(w_new.allFinite(), "precoder", iter);
        out.state = BeamState(Eigen::Map<const cmat>(w_new.data(), n, k),
                              out.state.phi, p_max);
        const double after_w = objective_w(w_new);
        require_finite(std::isfinite(after_w), "precoder", iter);
        if (options.observer) options.observer(iter, "w", before_w, after_w);

        double bound = after_w;
        if (use_phi) {
            const auto phi_forms =
                phi_quadratics(out.state.w_mat, aux, channels, config, options.stats);
            auto objective_phi = [&](const cvec& phi) {
                return smoothed_min_at(phi_forms, phi, zeta);
            };
            auto map_phi = [&](const cvec& phi) {
                return mm_phi_step(surrogate_phi_params(phi_forms, phi, zeta), phi);
            };
            const cvec phi_ref = out.state.phi;
            auto project_phi = [&](const cvec& phi) -> cvec {
                cvec proj(phi.size());
                for (int i = 0; i < phi.size(); ++i) {
                    const double mag = std::abs(phi(i));
                    proj(i) = mag > 1e-12 ? phi(i) / mag : phi_ref(i);
                }
                return proj;
            };
            const double before_phi = objective_phi(out.state.phi);
            const cvec phi_new = squarem_accelerate(out.state.phi, map_phi,
                                                    project_phi, objective_phi);
            require_finite(phi_new.allFinite(), "phase", iter);
            out.state = BeamState(out.state.w_mat, phi_new, p_max);
            effs = make_eff_set(phi_new, channels, options.stats);
            bound = objective_phi(phi_new);
            require_finite(std::isfinite(bound), "phase", iter);
            if (options.observer) options.observer(iter, "phi", before_phi, bound);
        }

        const double true_val = wmsr(out.state, effs, config).value;
        require_finite(std::isfinite(true_val), "rate evaluation", iter);
        trace.rows.push_back({iter, bound, true_val, zeta, elapsed_ms()});

        zeta = std::min(std::pow(zeta, config.iota), config.zeta_max);
        const double denom = std::abs(prev_true);
        const double diff = std::abs(true_val - prev_true);
        prev_true = true_val;
        if (denom > 1e-12 && diff / denom <= config.epsilon) {
            trace.status = "converged";
            break;
        }
    }
    if (iter > config.n_max) {
        iter = config.n_max;
        trace.status = "max-iterations";
    }
    trace.iterations = iter;
    trace.total_ms = elapsed_ms();
    return out;
}

} // namespace rissec
