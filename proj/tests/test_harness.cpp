// SPDX-License-Identifier: Apache-2.0
//
// Baseline schemes, the seeded experiment runner, CSV emission and the
// config reader.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "rissec/harness.hpp"
#include "rissec/mm.hpp"
#include "rissec/rng.hpp"
#include "rissec/scenario.hpp"

using namespace rissec;

namespace {

SystemConfig quick_config(int n, int m, int k) {
    SystemConfig cfg = default_config();
    cfg.n_tx = n;
    cfg.m_ris = m;
    cfg.k_users = k;
    cfg.weights.clear();
    cfg.n_max = 25;
    cfg.record_timing = false;
    cfg.validate();
    return cfg;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("phase quantization snaps to the grid with ties toward smaller angles") {
    cvec phi(4);
    phi << std::polar(1.0, 0.1), std::polar(1.0, kPi / 2 + 0.2), std::polar(1.0, kPi / 4),
        std::polar(1.0, kPi);
    cvec q = quantize_phases(phi, 2);
    CHECK(std::abs(q(0) - cx(1, 0)) < 1e-12);
    CHECK(std::abs(q(1) - cx(0, 1)) < 1e-12);
    CHECK(std::abs(q(2) - cx(1, 0)) < 1e-12); // equidistant, smaller angle wins
    CHECK(std::abs(q(3) - cx(-1, 0)) < 1e-12);

    cvec one(1);
    one << std::polar(1.0, 1.6);
    CHECK(std::abs(quantize_phases(one, 1)(0) - cx(-1, 0)) < 1e-12);
    one << std::polar(1.0, 0.4);
    CHECK(std::abs(quantize_phases(one, 3)(0) - std::polar(1.0, kPi / 4)) < 1e-12);
}

TEST_CASE("quantization error stays within half a grid step") {
    PhiloxRng rng(17, rng_stream(kStreamTest, 8, 0));
    cvec phi(1000);
    for (int i = 0; i < phi.size(); ++i) phi(i) = std::polar(1.0, 2 * kPi * rng.uniform01());
    cvec q = quantize_phases(phi, 2);
    for (int i = 0; i < phi.size(); ++i) {
        CHECK(std::abs(std::abs(q(i)) - 1.0) < 1e-12);
        double diff = std::arg(q(i) * std::conj(phi(i)));
        CHECK(std::abs(diff) <= kPi / 4 + 1e-9);
    }
}

TEST_CASE("quantization depth is limited to one to four bits") {
    cvec phi(1);
    phi << cx(1, 0);
    CHECK_THROWS_AS(quantize_phases(phi, 0), std::invalid_argument);
    CHECK_THROWS_AS(quantize_phases(phi, 5), std::invalid_argument);
    CHECK(quantize_phases(phi, 4).size() == 1);
}

TEST_CASE("the starting point is feasible, seeded and matched to the channel") {
    SystemConfig cfg = quick_config(3, 5, 2);
    ChannelSet ch = generate_channels(cfg, 3, rng_stream(kStreamChannels, 0, 0));
    BeamState a = initialize_state(cfg, ch, 3, rng_stream(kStreamInit, 0, 0));
    BeamState b = initialize_state(cfg, ch, 3, rng_stream(kStreamInit, 0, 0));
    BeamState c = initialize_state(cfg, ch, 3, rng_stream(kStreamInit, 0, 1));

    CHECK(a.w_mat.squaredNorm() == doctest::Approx(cfg.p_max).epsilon(1e-12));
    for (int m = 0; m < cfg.m_ris; ++m) CHECK(std::abs(std::abs(a.phi(m)) - 1.0) < 1e-12);
    CHECK((a.w_mat - b.w_mat).norm() == 0.0);
    CHECK((a.phi - b.phi).norm() == 0.0);
    CHECK((a.phi - c.phi).norm() > 0.0);

    // single user, no surface: the only column is a scaled matched filter
    SystemConfig cfg1 = quick_config(4, 0, 1);
    ChannelSet ch1 = generate_channels(cfg1, 5, rng_stream(kStreamChannels, 0, 1));
    BeamState s = initialize_state(cfg1, ch1, 5, rng_stream(kStreamInit, 0, 2));
    const double inner = std::abs(ch1.h_bu[0].dot(s.w_mat.col(0)));
    CHECK(inner == doctest::Approx(s.w_mat.col(0).norm() * ch1.h_bu[0].norm()).epsilon(1e-9));
}

TEST_CASE("the no-surface scheme matches the plain loop when no surface exists") {
    SystemConfig cfg = quick_config(2, 0, 2);
    ChannelSet ch = generate_channels(cfg, 99, rng_stream(kStreamChannels, 0, 0));
    BaselineOutcome plain = run_baseline("bcd-mm", cfg, ch, 99, 0, 0);
    BaselineOutcome noris = run_baseline("bcd-mm-no-ris", cfg, ch, 99, 0, 0);
    CHECK((plain.state.w_mat - noris.state.w_mat).norm() == 0.0);
    CHECK(plain.final_wmsr == noris.final_wmsr);
}

TEST_CASE("the impairment-unaware scheme is the plain loop under ideal statistics") {
    SystemConfig cfg = quick_config(2, 3, 2);
    cfg.kappa_t = 0.0;
    cfg.kappa_r = 0.0;
    cfg.validate();
    ChannelSet ch = generate_channels(cfg, 41, rng_stream(kStreamChannels, 0, 0));
    BaselineOutcome out = run_baseline("non-robust", cfg, ch, 41, 0, 0);

    MmOptions opt;
    opt.stats = HiStats::ideal();
    BeamState init = initialize_state(cfg, ch, 41, rng_stream(kStreamInit, 0, 0), opt.stats);
    BcdResult direct = bcd_mm(cfg, ch, init, opt);
    CHECK((out.state.w_mat - direct.state.w_mat).norm() == 0.0);
    CHECK((out.state.phi - direct.state.phi).norm() == 0.0);
    CHECK(out.final_wmsr ==
          doctest::Approx(wmsr(direct.state, ch, cfg).value).epsilon(1e-12));
}

TEST_CASE("the quantized scheme returns phases on the two bit grid") {
    SystemConfig cfg = quick_config(2, 4, 2);
    ChannelSet ch = generate_channels(cfg, 7, rng_stream(kStreamChannels, 0, 0));
    BaselineOutcome out = run_baseline("bcd-mm-2bit", cfg, ch, 7, 0, 0);
    for (int m = 0; m < cfg.m_ris; ++m) {
        const double ang = std::arg(out.state.phi(m));
        const double steps = ang / (kPi / 2);
        CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    }
    CHECK(out.state.w_mat.squaredNorm() <= cfg.p_max + 1e-9);
}

TEST_CASE("the random-phase scheme keeps its drawn phases") {
    SystemConfig cfg = quick_config(2, 4, 2);
    ChannelSet ch = generate_channels(cfg, 13, rng_stream(kStreamChannels, 2, 5));
    BaselineOutcome out = run_baseline("bcd-mm-rand", cfg, ch, 13, 2, 5);
    BeamState init = initialize_state(cfg, ch, 13, rng_stream(kStreamInit, 2, 5));
    CHECK((out.state.phi - init.phi).norm() == 0.0);
}

TEST_CASE("unknown schemes are rejected") {
    SystemConfig cfg = quick_config(2, 2, 1);
    ChannelSet ch = generate_channels(cfg, 1, 0);
    CHECK_THROWS_AS(run_baseline("gradient-descent", cfg, ch, 1, 0, 0), ConfigError);
}

TEST_CASE("sweep values map onto the right configuration fields") {
    SystemConfig base = quick_config(3, 6, 2);

    CHECK(apply_sweep_value(base, "m_ris", 24).m_ris == 24);
    CHECK(apply_sweep_value(base, "n_tx", 5).n_tx == 5);
    SystemConfig kc = apply_sweep_value(base, "k_users", 4);
    CHECK(kc.k_users == 4);
    CHECK(kc.weights.size() == 4);
    SystemConfig pc = apply_sweep_value(base, "p_dbm", 27.0);
    CHECK(pc.p_max == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));
    SystemConfig hc = apply_sweep_value(base, "kappa", 0.05);
    CHECK(hc.kappa_t == 0.05);
    CHECK(hc.kappa_r == 0.05);
    CHECK(apply_sweep_value(base, "rician_k", 5.0).rician_k == 5.0);
    CHECK(apply_sweep_value(base, "none", 0.0).m_ris == base.m_ris);

    CHECK_THROWS_AS(apply_sweep_value(base, "m_ris", 8.5), ConfigError);
    CHECK_THROWS_AS(apply_sweep_value(base, "bandwidth", 1e6), ConfigError);
    CHECK_THROWS_AS(apply_sweep_value(base, "k_users", 0.0), ConfigError);
}

TEST_CASE("the runner fills one row per trial and aggregates per sweep point") {
    SystemConfig cfg = quick_config(2, 2, 2);
    ExperimentSpec spec;
    spec.algorithm = "bcd-mm";
    spec.sweep_key = "m_ris";
    spec.sweep_values = {0, 4};
    spec.trials = 2;
    spec.seed_base = 21;
    spec.threads = 1;

    ExperimentResult res = run_experiment(spec, cfg);
    REQUIRE(res.rows.size() == 4);
    REQUIRE(res.aggregates.size() == 2);
    CHECK(res.rows[0].sweep_value == 0.0);
    CHECK(res.rows[0].m_ris == 0);
    CHECK(res.rows[3].sweep_value == 4.0);
    CHECK(res.rows[3].m_ris == 4);
    CHECK(res.rows[1].trial == 1);
    CHECK(res.rows[0].seed == 21);
    CHECK(res.rows[0].algorithm == "bcd-mm");
    for (const auto& row : res.rows) {
        CHECK_FALSE(row.failed);
        CHECK(row.iterations >= 1);
        CHECK(std::isfinite(row.final_wmsr_nats));
    }
    const double mean0 = 0.5 * (res.rows[0].final_wmsr_nats + res.rows[1].final_wmsr_nats);
    CHECK(res.aggregates[0].mean == doctest::Approx(mean0).epsilon(1e-14));
    CHECK(res.aggregates[0].completed == 2);
    CHECK(res.aggregates[1].sweep_value == 4.0);
}

TEST_CASE("standard error shrinks roughly with the root of the trial count") {
    SystemConfig cfg = quick_config(2, 2, 2);
    ExperimentSpec spec;
    spec.algorithm = "bcd-mm";
    spec.trials = 12;
    spec.seed_base = 8;
    spec.threads = 1;
    ExperimentResult small = run_experiment(spec, cfg);
    spec.trials = 48;
    ExperimentResult big = run_experiment(spec, cfg);
    REQUIRE(small.aggregates[0].std_error > 0.0);
    const double ratio = small.aggregates[0].std_error / big.aggregates[0].std_error;
    CHECK(ratio > 1.1);
    CHECK(ratio < 3.6);
}

TEST_CASE("identical runs emit identical bytes") {
    SystemConfig cfg = quick_config(2, 3, 2);
    ExperimentSpec spec;
    spec.algorithm = "bcd-mm";
    spec.trials = 2;
    spec.seed_base = 3;
    spec.threads = 1;
    ExperimentResult a = run_experiment(spec, cfg);
    ExperimentResult b = run_experiment(spec, cfg);
    CHECK(results_csv(a) == results_csv(b));

    BaselineOutcome t1 = run_baseline("bcd-mm", cfg,
                                      generate_channels(cfg, 3, rng_stream(kStreamChannels, 0, 0)),
                                      3, 0, 0);
    BaselineOutcome t2 = run_baseline("bcd-mm", cfg,
                                      generate_channels(cfg, 3, rng_stream(kStreamChannels, 0, 0)),
                                      3, 0, 0);
    CHECK(trace_csv(t1.trace) == trace_csv(t2.trace));
}

TEST_CASE("result rows print through the fixed header and %.10g") {
    ExperimentResult res;
    ResultRow row;
    row.seed = 7;
    row.trial = 0;
    row.algorithm = "bcd-mm";
    row.sweep_key = "none";
    row.sweep_value = 0.0;
    row.n_tx = 4;
    row.m_ris = 16;
    row.k_users = 3;
    row.p_dbm = 30.0;
    row.kappa_t = 0.01;
    row.kappa_r = 0.01;
    row.iterations = 12;
    row.final_wmsr_nats = 0.1234567890123;
    row.wall_ms = 0.0;
    res.rows.push_back(row);

    const std::string expect =
        "seed,trial,algorithm,sweep_key,sweep_value,N,M,K,p_dbm,"
        "kappa_t,kappa_r,iterations,final_wmsr_nats,wall_ms\n"
        "7,0,bcd-mm,none,0,4,16,3,30,0.01,0.01,12,0.123456789,0\n";
    CHECK(results_csv(res) == expect);

    RunTrace trace;
    TraceRow tr;
    tr.iteration = 1;
    tr.bound_objective = 0.5;
    tr.true_wmsr = 0.25;
    tr.zeta = 1.25;
    tr.wall_ms = 0.0;
    trace.rows.push_back(tr);
    CHECK(trace_csv(trace) ==
          "iteration,bound_objective_nats,true_wmsr_nats,zeta,wall_ms\n1,0.5,0.25,1.25,0\n");
}

TEST_CASE("the config reader fills every section and the sweep spec") {
    const std::string path = temp_path("rissec_cfg_full.ini");
    {
        std::ofstream out(path);
        out << "# full tour\n"
               "[scenario]\n"
               "n_tx = 3\n"
               "m_ris = 6\n"
               "k_users = 2\n"
               "p_dbm = 27\n"
               "bandwidth_hz = 5e6\n"
               "noise_density_dbm_hz = -170\n"
               "rician_k = 4\n"
               "user_area_side = 6\n"
               "redraw_users = false\n"
               "bs_pos = 1, 2, 25\n"
               "ris_pos = 40, -3, 12\n"
               "user_center = 250, 5, 1.5\n"
               "eve_pos = 260, 8, 1.5\n"
               "alpha_br = 2.2\n"
               "alpha_bu = 3.8\n"
               "weights = 1.5, 0.5\n"
               "\n"
               "[hi]\n"
               "kappa_t = 0.02\n"
               "kappa_r = 0.03\n"
               "\n"
               "[algo]\n"
               "zeta = 1.5\n"
               "n_max = 111\n"
               "twobit_refit = no\n"
               "record_timing = off\n"
               "algorithm = bcd-socp\n"
               "\n"
               "[ccp]\n"
               "lambda_init = 0.002\n"
               "t_max = 17\n"
               "\n"
               "[sweep]\n"
               "key = p_dbm\n"
               "values = 20, 25, 30\n"
               "trials = 5\n"
               "seed = 99\n";
    }
    ExperimentSpec spec;
    SystemConfig cfg = load_config_file(path, &spec);
    std::filesystem::remove(path);

    CHECK(cfg.n_tx == 3);
    CHECK(cfg.m_ris == 6);
    CHECK(cfg.k_users == 2);
    CHECK(cfg.p_max == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));
    CHECK(cfg.bandwidth_hz == 5e6);
    CHECK(cfg.rician_k == 4.0);
    CHECK(cfg.geometry.user_area_side == 6.0);
    CHECK_FALSE(cfg.redraw_users);
    CHECK(cfg.geometry.bs.z == 25.0);
    CHECK(cfg.geometry.ris.y == -3.0);
    CHECK(cfg.geometry.alpha_br == 2.2);
    CHECK(cfg.geometry.alpha_bu == 3.8);
    REQUIRE(cfg.weights.size() == 2);
    CHECK(cfg.weights[0] == 1.5);
    CHECK(cfg.kappa_t == 0.02);
    CHECK(cfg.kappa_r == 0.03);
    CHECK(cfg.zeta == 1.5);
    CHECK(cfg.n_max == 111);
    CHECK_FALSE(cfg.twobit_refit);
    CHECK_FALSE(cfg.record_timing);
    CHECK(cfg.ccp.lambda_init == 0.002);
    CHECK(cfg.ccp.t_max == 17);
    CHECK(cfg.noise_user > 0.0);
    CHECK(spec.algorithm == "bcd-socp");
    CHECK(spec.sweep_key == "p_dbm");
    REQUIRE(spec.sweep_values.size() == 3);
    CHECK(spec.sweep_values[1] == 25.0);
    CHECK(spec.trials == 5);
    CHECK(spec.seed_base == 99);
}

TEST_CASE("missing weights refill to ones at the configured user count") {
    const std::string path = temp_path("rissec_cfg_weights.ini");
    {
        std::ofstream out(path);
        out << "[scenario]\nk_users = 2\n";
    }
    SystemConfig cfg = load_config_file(path, nullptr);
    std::filesystem::remove(path);
    REQUIRE(cfg.weights.size() == 2);
    CHECK(cfg.weights[0] == 1.0);
    CHECK(cfg.weights[1] == 1.0);
}

TEST_CASE("config errors carry the offending line number") {
    const std::string path = temp_path("rissec_cfg_bad.ini");
    {
        std::ofstream out(path);
        out << "[scenario]\n"
               "n_tx = 2\n"
               "mystery = 5\n";
    }
    bool threw = false;
    try {
        load_config_file(path, nullptr);
    } catch (const ConfigError& e) {
        threw = true;
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
    std::filesystem::remove(path);
    CHECK(threw);
}

TEST_CASE("sweep sections require a spec sink and bad values are refused") {
    const std::string path = temp_path("rissec_cfg_sweep.ini");
    {
        std::ofstream out(path);
        out << "[sweep]\nkey = m_ris\nvalues = 4\n";
    }
    CHECK_THROWS_AS(load_config_file(path, nullptr), ConfigError);
    std::filesystem::remove(path);

    const std::string bad = temp_path("rissec_cfg_badbool.ini");
    {
        std::ofstream out(bad);
        out << "[algo]\nrecord_timing = maybe\n";
    }
    CHECK_THROWS_AS(load_config_file(bad, nullptr), ConfigError);
    std::filesystem::remove(bad);

    CHECK_THROWS_AS(load_config_file(temp_path("rissec_no_such_file.ini"), nullptr),
                    ConfigError);
}
