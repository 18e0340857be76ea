// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness implementation.
//
// Seed layout: every trial draws its channels from stream
// (kStreamChannels, sweep, trial) and its starting point from
// (kStreamInit, sweep, trial).  With redraw_users = false the user drop
// comes from a dedicated stream pinned at trial 0 so the per-trial fading
// streams stay untouched.  Rows are stored sweep-major, so the CSV is a
// pure function of (config, spec) when timing capture is off.

#include "rissec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "rissec/fp.hpp"
#include "rissec/himodel.hpp"
#include "rissec/mm.hpp"
#include "rissec/quadform.hpp"
#include "rissec/rng.hpp"
#include "rissec/socp.hpp"

namespace rissec {

namespace {

bool known_algorithm(const std::string& name) {
    return name == "bcd-mm" || name == "bcd-socp" || name == "non-robust" ||
           name == "bcd-mm-rand" || name == "bcd-mm-no-ris" || name == "bcd-mm-2bit";
}

bool known_sweep_key(const std::string& key) {
    return key == "none" || key == "m_ris" || key == "n_tx" || key == "k_users" ||
           key == "p_dbm" || key == "kappa" || key == "rician_k";
}

ChannelSet make_trial_channels(const SystemConfig& config, std::uint64_t seed,
                               std::uint64_t sweep_index, std::uint64_t trial_index) {
    const std::uint64_t stream =
        rng_stream(kStreamChannels, static_cast<std::uint32_t>(sweep_index),
                   static_cast<std::uint32_t>(trial_index));
    if (config.redraw_users) return generate_channels(config, seed, stream);
    const std::vector<Vec3> positions = draw_user_positions(
        config, seed,
        rng_stream(kStreamPositions, static_cast<std::uint32_t>(sweep_index), 0));
    return generate_channels(config, seed, stream, positions);
}

// One accelerated precoder pass at fixed phases, used by the quantized
// baseline to refit the precoder on the phase grid.
BeamState refit_precoder(const SystemConfig& config, const ChannelSet& channels,
                         const BeamState& state, double zeta) {
    const EffSet effs = make_eff_set(state.phi, channels);
    AuxState aux = make_aux(state, effs, config);
    update_all_aux(aux, state, effs, config);
    const std::vector<QuadraticForm> forms = w_quadratics(aux, effs, config);
    const double p_max = config.p_max;

    const Objective objective = [&](const cvec& w) {
        return smoothed_min_at(forms, w, zeta);
    };
    const FixedPointMap map = [&](const cvec& w) {
        return mm_w_step(surrogate_w_params(forms, w, zeta, p_max), p_max, w);
    };
    const Projector project = [&](const cvec& w) {
        const double nsq = w.squaredNorm();
        if (nsq < 1e-300) return w;
        return cvec(w * std::sqrt(p_max / nsq));
    };

    const cvec w_new = squarem_accelerate(state.w_vec, map, project, objective);
    return BeamState(
        cmat(Eigen::Map<const cmat>(w_new.data(), config.n_tx, config.k_users)),
        state.phi, p_max);
}

} // namespace

BeamState initialize_state(const SystemConfig& config, const ChannelSet& channels,
                           std::uint64_t seed, std::uint64_t stream,
                           const HiStats& stats) {
    PhiloxRng rng(seed, stream);
    cvec phi(config.m_ris);
    for (int m = 0; m < config.m_ris; ++m)
        phi(m) = std::polar(1.0, 2.0 * kPi * rng.uniform01());

    const EffSet effs = make_eff_set(phi, channels, stats);
    cmat w(config.n_tx, config.k_users);
    for (int k = 0; k < config.k_users; ++k) w.col(k) = effs.user[k].h_hat;
    if (!(w.norm() > 1e-150)) w.setOnes();
    w *= std::sqrt(config.p_max) / w.norm();
    return BeamState(std::move(w), std::move(phi), config.p_max);
}

cvec quantize_phases(const cvec& phi, int bits) {
    if (bits < 1 || bits > 4)
        throw std::invalid_argument("quantize_phases: bits must be in {1,2,3,4}");
    const int levels = 1 << bits;
    cvec out(phi.size());
    for (Eigen::Index m = 0; m < phi.size(); ++m) {
        double theta = std::arg(phi(m));
        if (theta < 0.0) theta += 2.0 * kPi;
        const double scaled = theta * levels / (2.0 * kPi);
        // round half down so a tie snaps to the smaller grid angle
        long idx = static_cast<long>(std::ceil(scaled - 0.5)) % levels;
        if (idx < 0) idx += levels;
        out(m) = std::polar(1.0, 2.0 * kPi * static_cast<double>(idx) / levels);
    }
    return out;
}

BaselineOutcome run_baseline(const std::string& algorithm, const SystemConfig& config,
                             const ChannelSet& channels, std::uint64_t seed,
                             std::uint64_t sweep_index, std::uint64_t trial_index) {
    if (!known_algorithm(algorithm))
        throw ConfigError("unknown algorithm: " + algorithm);
    const std::uint64_t init_stream =
        rng_stream(kStreamInit, static_cast<std::uint32_t>(sweep_index),
                   static_cast<std::uint32_t>(trial_index));

    BaselineOutcome out;
    if (algorithm == "bcd-mm" || algorithm == "bcd-mm-rand" ||
        algorithm == "bcd-mm-2bit") {
        MmOptions opts;
        opts.phi_block = algorithm != "bcd-mm-rand";
        const BeamState init = initialize_state(config, channels, seed, init_stream);
        BcdResult res = bcd_mm(config, channels, init, opts);
        out.state = std::move(res.state);
        out.trace = std::move(res.trace);
        if (algorithm == "bcd-mm-2bit") {
            const cvec phi_q = quantize_phases(out.state.phi, 2);
            BeamState quantized(out.state.w_mat, phi_q, config.p_max);
            if (config.twobit_refit) {
                const double zeta = out.trace.rows.empty()
                                        ? config.zeta
                                        : out.trace.rows.back().zeta;
                quantized = refit_precoder(config, channels, quantized, zeta);
            }
            out.state = std::move(quantized);
        }
        out.final_wmsr = wmsr(out.state, channels, config).value;
    } else if (algorithm == "bcd-socp") {
        const BeamState init = initialize_state(config, channels, seed, init_stream);
        BcdResult res = bcd_socp(config, channels, init);
        out.state = std::move(res.state);
        out.trace = std::move(res.trace);
        out.final_wmsr = wmsr(out.state, channels, config).value;
    } else if (algorithm == "non-robust") {
        // The optimizer believes in distortion-free hardware; the result is
        // scored under the impaired model it ignored.
        SystemConfig believed = config;
        believed.kappa_t = 0.0;
        believed.kappa_r = 0.0;
        believed.validate();
        MmOptions opts;
        opts.stats = HiStats::ideal();
        const BeamState init =
            initialize_state(believed, channels, seed, init_stream, opts.stats);
        BcdResult res = bcd_mm(believed, channels, init, opts);
        out.state = std::move(res.state);
        out.trace = std::move(res.trace);
        out.final_wmsr = wmsr(out.state, channels, config).value;
    } else { // bcd-mm-no-ris
        SystemConfig no_ris = config;
        no_ris.m_ris = 0;
        no_ris.validate();
        const ChannelSet direct_only =
            make_trial_channels(no_ris, seed, sweep_index, trial_index);
        const BeamState init = initialize_state(no_ris, direct_only, seed, init_stream);
        BcdResult res = bcd_mm(no_ris, direct_only, init);
        out.state = std::move(res.state);
        out.trace = std::move(res.trace);
        out.final_wmsr = wmsr(out.state, direct_only, no_ris).value;
    }
    return out;
}

SystemConfig apply_sweep_value(const SystemConfig& base, const std::string& key,
                               double value) {
    SystemConfig cfg = base;
    if (key == "none") {
        // single point, the value carries no meaning
    } else if (key == "m_ris" || key == "n_tx" || key == "k_users") {
        const long long rounded = std::llround(value);
        if (static_cast<double>(rounded) != value)
            throw ConfigError("sweep key " + key + " needs integer values");
        const int v = static_cast<int>(rounded);
        if (key == "m_ris") {
            cfg.m_ris = v;
        } else if (key == "n_tx") {
            cfg.n_tx = v;
        } else {
            cfg.k_users = v;
            if (static_cast<int>(cfg.weights.size()) != v) cfg.weights.clear();
        }
    } else if (key == "p_dbm") {
        cfg.p_max = std::pow(10.0, (value - 30.0) / 10.0);
    } else if (key == "kappa") {
        cfg.kappa_t = value;
        cfg.kappa_r = value;
    } else if (key == "rician_k") {
        cfg.rician_k = value;
    } else {
        throw ConfigError("unknown sweep key: " + key);
    }
    cfg.validate();
    return cfg;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const SystemConfig& config) {
    if (spec.trials < 1) throw ConfigError("trials must be at least 1");
    if (!known_algorithm(spec.algorithm))
        throw ConfigError("unknown algorithm: " + spec.algorithm);
    if (!known_sweep_key(spec.sweep_key))
        throw ConfigError("unknown sweep key: " + spec.sweep_key);

    std::vector<double> values = spec.sweep_values;
    if (spec.sweep_key == "none")
        values.assign(1, 0.0);
    else if (values.empty())
        throw ConfigError("sweep key " + spec.sweep_key + " has no values");

    SystemConfig base = config;
    base.validate();

    // Resolve every sweep point up front so a bad value fails before any work.
    std::vector<SystemConfig> sweep_cfgs;
    sweep_cfgs.reserve(values.size());
    for (double v : values)
        sweep_cfgs.push_back(apply_sweep_value(base, spec.sweep_key, v));

    if (!spec.trace_dir.empty())
        std::filesystem::create_directories(spec.trace_dir);

    const std::size_t trials = static_cast<std::size_t>(spec.trials);
    const std::size_t n_jobs = values.size() * trials;
    std::vector<ResultRow> rows(n_jobs);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= n_jobs) return;
            const std::size_t s = job / trials;
            const std::size_t t = job % trials;
            const SystemConfig& cfg = sweep_cfgs[s];

            ResultRow row;
            row.seed = spec.seed_base;
            row.trial = static_cast<int>(t);
            row.algorithm = spec.algorithm;
            row.sweep_key = spec.sweep_key;
            row.sweep_value = values[s];
            row.n_tx = cfg.n_tx;
            row.m_ris = cfg.m_ris;
            row.k_users = cfg.k_users;
            row.p_dbm = cfg.p_dbm();
            row.kappa_t = cfg.kappa_t;
            row.kappa_r = cfg.kappa_r;
            try {
                const ChannelSet ch = make_trial_channels(cfg, spec.seed_base, s, t);
                const BaselineOutcome outcome =
                    run_baseline(spec.algorithm, cfg, ch, spec.seed_base, s, t);
                row.iterations = outcome.trace.iterations;
                row.final_wmsr_nats = outcome.final_wmsr;
                row.wall_ms = outcome.trace.total_ms;
                if (!spec.trace_dir.empty()) {
                    char name[160];
                    std::snprintf(name, sizeof name, "trace_%s_s%02zu_t%03zu.csv",
                                  spec.algorithm.c_str(), s, t);
                    write_trace_csv(
                        (std::filesystem::path(spec.trace_dir) / name).string(),
                        outcome.trace);
                }
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
                row.final_wmsr_nats = std::numeric_limits<double>::quiet_NaN();
            } catch (...) {
                row.failed = true;
                row.error = "unknown error";
                row.final_wmsr_nats = std::numeric_limits<double>::quiet_NaN();
            }
            rows[job] = std::move(row);
        }
    };

    std::size_t n_threads = spec.threads > 0
                                ? static_cast<std::size_t>(spec.threads)
                                : static_cast<std::size_t>(
                                      std::thread::hardware_concurrency());
    n_threads = std::max<std::size_t>(1, std::min(n_threads, n_jobs));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    ExperimentResult result;
    result.rows = std::move(rows);
    result.aggregates.reserve(values.size());
    for (std::size_t s = 0; s < values.size(); ++s) {
        SweepAggregate agg;
        agg.sweep_value = values[s];
        double sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const ResultRow& row = result.rows[s * trials + t];
            if (row.failed) continue;
            sum += row.final_wmsr_nats;
            ++agg.completed;
        }
        if (agg.completed > 0) agg.mean = sum / agg.completed;
        if (agg.completed > 1) {
            double ss = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                const ResultRow& row = result.rows[s * trials + t];
                if (row.failed) continue;
                const double d = row.final_wmsr_nats - agg.mean;
                ss += d * d;
            }
            agg.std_error =
                std::sqrt(ss / (agg.completed - 1)) / std::sqrt(double(agg.completed));
        }
        result.aggregates.push_back(agg);
    }
    return result;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace

std::string results_csv(const ExperimentResult& result) {
    std::string out =
        "seed,trial,algorithm,sweep_key,sweep_value,N,M,K,p_dbm,"
        "kappa_t,kappa_r,iterations,final_wmsr_nats,wall_ms\n";
    char buf[96];
    for (const ResultRow& row : result.rows) {
        std::snprintf(buf, sizeof buf, "%llu,%d,",
                      static_cast<unsigned long long>(row.seed), row.trial);
        out += buf;
        out += row.algorithm;
        out += ',';
        out += row.sweep_key;
        out += ',';
        out += fmt_double(row.sweep_value);
        std::snprintf(buf, sizeof buf, ",%d,%d,%d,", row.n_tx, row.m_ris, row.k_users);
        out += buf;
        out += fmt_double(row.p_dbm);
        out += ',';
        out += fmt_double(row.kappa_t);
        out += ',';
        out += fmt_double(row.kappa_r);
        std::snprintf(buf, sizeof buf, ",%d,", row.iterations);
        out += buf;
        out += fmt_double(row.final_wmsr_nats);
        out += ',';
        out += fmt_double(row.wall_ms);
        out += '\n';
    }
    return out;
}

std::string trace_csv(const RunTrace& trace) {
    std::string out = "iteration,bound_objective_nats,true_wmsr_nats,zeta,wall_ms\n";
    for (const TraceRow& row : trace.rows) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%d,", row.iteration);
        out += buf;
        out += fmt_double(row.bound_objective);
        out += ',';
        out += fmt_double(row.true_wmsr);
        out += ',';
        out += fmt_double(row.zeta);
        out += ',';
        out += fmt_double(row.wall_ms);
        out += '\n';
    }
    return out;
}

void write_results_csv(const std::string& path, const ExperimentResult& result) {
    write_text_file(path, results_csv(result));
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
    write_text_file(path, trace_csv(trace));
}

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void config_fail(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& value, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        config_fail(line, "invalid number '" + value + "' for key " + key);
    }
}

int parse_int(const std::string& value, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            throw std::out_of_range("");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        config_fail(line, "invalid integer '" + value + "' for key " + key);
    }
}

std::uint64_t parse_u64(const std::string& value, int line, const std::string& key) {
    try {
        if (value.empty() || value[0] == '-') throw std::invalid_argument("");
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        config_fail(line, "invalid unsigned integer '" + value + "' for key " + key);
    }
}

bool parse_bool(const std::string& value, int line, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    config_fail(line, "invalid boolean '" + value + "' for key " + key);
}

std::vector<double> parse_list(const std::string& value, int line,
                               const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) config_fail(line, "empty entry in list for key " + key);
        out.push_back(parse_double(tok, line, key));
    }
    if (out.empty()) config_fail(line, "empty list for key " + key);
    return out;
}

Vec3 parse_vec3(const std::string& value, int line, const std::string& key) {
    const std::vector<double> v = parse_list(value, line, key);
    if (v.size() != 3) config_fail(line, "key " + key + " needs x,y,z");
    return Vec3{v[0], v[1], v[2]};
}

} // namespace

SystemConfig load_config_file(const std::string& path, ExperimentSpec* spec_out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    SystemConfig cfg = default_config();
    // refilled by validate at the file's user count unless the file sets them
    cfg.weights.clear();
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']') config_fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "hi" && section != "algo" &&
                section != "ccp" && section != "sweep")
                config_fail(line_no, "unknown section [" + section + "]");
            if (section == "sweep" && spec_out == nullptr)
                config_fail(line_no, "sweep section is not allowed here");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) config_fail(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) config_fail(line_no, "empty key");
        if (value.empty()) config_fail(line_no, "empty value for key " + key);
        if (section.empty()) config_fail(line_no, "key outside a section: " + key);

        if (section == "scenario") {
            if (key == "n_tx")
                cfg.n_tx = parse_int(value, line_no, key);
            else if (key == "m_ris")
                cfg.m_ris = parse_int(value, line_no, key);
            else if (key == "k_users")
                cfg.k_users = parse_int(value, line_no, key);
            else if (key == "p_dbm")
                cfg.p_max =
                    std::pow(10.0, (parse_double(value, line_no, key) - 30.0) / 10.0);
            else if (key == "bandwidth_hz")
                cfg.bandwidth_hz = parse_double(value, line_no, key);
            else if (key == "noise_density_dbm_hz")
                cfg.noise_density_dbm_hz = parse_double(value, line_no, key);
            else if (key == "rician_k")
                cfg.rician_k = parse_double(value, line_no, key);
            else if (key == "weights")
                cfg.weights = parse_list(value, line_no, key);
            else if (key == "user_area_side")
                cfg.geometry.user_area_side = parse_double(value, line_no, key);
            else if (key == "redraw_users")
                cfg.redraw_users = parse_bool(value, line_no, key);
            else if (key == "bs_pos")
                cfg.geometry.bs = parse_vec3(value, line_no, key);
            else if (key == "ris_pos")
                cfg.geometry.ris = parse_vec3(value, line_no, key);
            else if (key == "user_center")
                cfg.geometry.user_center = parse_vec3(value, line_no, key);
            else if (key == "eve_pos")
                cfg.geometry.eve = parse_vec3(value, line_no, key);
            else if (key == "alpha_br")
                cfg.geometry.alpha_br = parse_double(value, line_no, key);
            else if (key == "alpha_ru")
                cfg.geometry.alpha_ru = parse_double(value, line_no, key);
            else if (key == "alpha_re")
                cfg.geometry.alpha_re = parse_double(value, line_no, key);
            else if (key == "alpha_bu")
                cfg.geometry.alpha_bu = parse_double(value, line_no, key);
            else if (key == "alpha_be")
                cfg.geometry.alpha_be = parse_double(value, line_no, key);
            else
                config_fail(line_no, "unknown key '" + key + "' in [scenario]");
        } else if (section == "hi") {
            if (key == "kappa_t")
                cfg.kappa_t = parse_double(value, line_no, key);
            else if (key == "kappa_r")
                cfg.kappa_r = parse_double(value, line_no, key);
            else
                config_fail(line_no, "unknown key '" + key + "' in [hi]");
        } else if (section == "algo") {
            if (key == "zeta")
                cfg.zeta = parse_double(value, line_no, key);
            else if (key == "iota")
                cfg.iota = parse_double(value, line_no, key);
            else if (key == "zeta_max")
                cfg.zeta_max = parse_double(value, line_no, key);
            else if (key == "epsilon")
                cfg.epsilon = parse_double(value, line_no, key);
            else if (key == "n_max")
                cfg.n_max = parse_int(value, line_no, key);
            else if (key == "twobit_refit")
                cfg.twobit_refit = parse_bool(value, line_no, key);
            else if (key == "record_timing")
                cfg.record_timing = parse_bool(value, line_no, key);
            else if (key == "algorithm") {
                if (spec_out == nullptr)
                    config_fail(line_no, "key algorithm is not allowed here");
                if (!known_algorithm(value))
                    config_fail(line_no, "unknown algorithm '" + value + "'");
                spec_out->algorithm = value;
            } else {
                config_fail(line_no, "unknown key '" + key + "' in [algo]");
            }
        } else if (section == "ccp") {
            if (key == "lambda_init")
                cfg.ccp.lambda_init = parse_double(value, line_no, key);
            else if (key == "gamma")
                cfg.ccp.gamma = parse_double(value, line_no, key);
            else if (key == "lambda_max")
                cfg.ccp.lambda_max = parse_double(value, line_no, key);
            else if (key == "eps_phase")
                cfg.ccp.eps_phase = parse_double(value, line_no, key);
            else if (key == "eps_slack")
                cfg.ccp.eps_slack = parse_double(value, line_no, key);
            else if (key == "t_max")
                cfg.ccp.t_max = parse_int(value, line_no, key);
            else
                config_fail(line_no, "unknown key '" + key + "' in [ccp]");
        } else { // sweep
            if (key == "key") {
                if (!known_sweep_key(value))
                    config_fail(line_no, "unknown sweep key '" + value + "'");
                spec_out->sweep_key = value;
            } else if (key == "values") {
                spec_out->sweep_values = parse_list(value, line_no, key);
            } else if (key == "trials") {
                spec_out->trials = parse_int(value, line_no, key);
            } else if (key == "seed") {
                spec_out->seed_base = parse_u64(value, line_no, key);
            } else {
                config_fail(line_no, "unknown key '" + key + "' in [sweep]");
            }
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace rissec
