// SPDX-License-Identifier: Apache-2.0
//
// Experiment harness: baseline schemes, a seeded Monte-Carlo runner with a
// worker pool, CSV emission, and the sectioned key = value config reader.
//
// Result rows are merged by (sweep index, trial index) regardless of worker
// completion order, so a (config, seed) pair reproduces the CSV byte for
// byte when timing capture is off.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rissec/config.hpp"
#include "rissec/rate.hpp"
#include "rissec/scenario.hpp"
#include "rissec/trace.hpp"

namespace rissec {

// One experiment: a named algorithm swept over one scenario parameter.
//
// Algorithms: bcd-mm, bcd-socp, non-robust, bcd-mm-rand, bcd-mm-no-ris,
// bcd-mm-2bit.  Sweep keys: m_ris, n_tx, k_users, p_dbm, kappa, rician_k,
// or "none" (single point at the config values).
struct ExperimentSpec {
    std::string algorithm = "bcd-mm";
    std::string sweep_key = "none";
    std::vector<double> sweep_values; // empty with key "none" -> one point
    int trials = 1;
    std::uint64_t seed_base = 1;
    int threads = 0;                  // 0 -> hardware concurrency
    std::string trace_dir;            // empty -> per-trial traces not written
};

// Feasible starting point: precoder columns are matched filters on the
// effective user channels, rescaled to transmit at full power; phases are
// drawn uniformly on the torus from (seed, stream).  stats selects the
// channel statistics the designer believes in, so a scheme that ignores the
// phase noise starts from its own model rather than the true one.
BeamState initialize_state(const SystemConfig& config, const ChannelSet& channels,
                           std::uint64_t seed, std::uint64_t stream = 0,
                           const HiStats& stats = HiStats::robust());

// Snaps each phase to the nearest of the 2^bits uniform grid angles, ties
// resolved toward the smaller angle.  bits outside {1,2,3,4} is a
// parameter error.
cvec quantize_phases(const cvec& phi, int bits);

struct BaselineOutcome {
    BeamState state;
    RunTrace trace;
    double final_wmsr = 0.0; // clamped WMSR under the true impairment model
};

// Runs one named scheme on one channel draw.  The seed and indices only
// feed streams that the scheme itself needs (fresh channels for the no-RIS
// variant, the random phase init).
BaselineOutcome run_baseline(const std::string& algorithm, const SystemConfig& config,
                             const ChannelSet& channels, std::uint64_t seed,
                             std::uint64_t sweep_index, std::uint64_t trial_index);

struct ResultRow {
    std::uint64_t seed = 0;
    int trial = 0;
    std::string algorithm;
    std::string sweep_key;
    double sweep_value = 0.0;
    int n_tx = 0;
    int m_ris = 0;
    int k_users = 0;
    double p_dbm = 0.0;
    double kappa_t = 0.0;
    double kappa_r = 0.0;
    int iterations = 0;
    double final_wmsr_nats = 0.0;
    double wall_ms = 0.0;
    bool failed = false; // trial aborted; emitted with nan rate, skipped in aggregates
    std::string error;
};

struct SweepAggregate {
    double sweep_value = 0.0;
    int completed = 0;   // trials that produced a value
    double mean = 0.0;
    double std_error = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;          // sweep-major, then trial order
    std::vector<SweepAggregate> aggregates;
};

// Applies one sweep value to a copy of the base config.  Unknown keys are
// config errors; the copy is revalidated.
SystemConfig apply_sweep_value(const SystemConfig& base, const std::string& key,
                               double value);

// Runs trials x sweep values on a worker pool.  Each trial draws its own
// channels from (seed_base, channel stream for that sweep/trial); a trial
// that throws becomes a failed row and the run continues.
ExperimentResult run_experiment(const ExperimentSpec& spec, const SystemConfig& config);

// CSV emission.  Headers are fixed; numbers print via %.10g.
std::string results_csv(const ExperimentResult& result);
std::string trace_csv(const RunTrace& trace);
void write_results_csv(const std::string& path, const ExperimentResult& result);
void write_trace_csv(const std::string& path, const RunTrace& trace);

// Reads a sectioned key = value file ([scenario], [hi], [algo], [ccp],
// [sweep]; # or ; comments).  Unknown sections or keys are errors with the
// line number in the message.  The sweep section fills *spec_out when it is
// non-null and is rejected otherwise.
SystemConfig load_config_file(const std::string& path, ExperimentSpec* spec_out);

} // namespace rissec
