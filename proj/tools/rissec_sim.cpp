// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: load a config, run one experiment, emit CSV.
// Exit codes: 0 success, 1 flag or config error, 2 runtime failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "rissec/config.hpp"
#include "rissec/harness.hpp"

namespace {

// --sweep m_ris=8,16,32
void parse_sweep_flag(const std::string& text, rissec::ExperimentSpec& spec) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw rissec::ConfigError("--sweep expects key=v1,v2,...");
    spec.sweep_key = text.substr(0, eq);
    spec.sweep_values.clear();
    const std::string rest = text.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        std::size_t comma = rest.find(',', start);
        if (comma == std::string::npos) comma = rest.size();
        const std::string tok = rest.substr(start, comma - start);
        try {
            std::size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument("");
            spec.sweep_values.push_back(v);
        } catch (const std::exception&) {
            throw rissec::ConfigError("--sweep has a bad value: '" + tok + "'");
        }
        start = comma + 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted minimum secrecy rate experiments for an RIS-assisted "
                 "multiuser MISO downlink under hardware impairments"};

    std::string config_path;
    std::string algorithm;
    std::string sweep_text;
    std::string out_path = "results.csv";
    std::string trace_dir;
    int trials = 0;
    std::uint64_t seed = 1;
    int threads = 0;

    app.add_option("--config", config_path, "config file (sectioned key = value)");
    app.add_option("--algorithm", algorithm,
                   "bcd-mm | bcd-socp | non-robust | bcd-mm-rand | bcd-mm-no-ris | "
                   "bcd-mm-2bit");
    CLI::Option* trials_opt =
        app.add_option("--trials", trials, "Monte-Carlo trials per sweep value");
    CLI::Option* seed_opt = app.add_option("--seed", seed, "base seed");
    app.add_option("--sweep", sweep_text, "sweep as key=v1,v2,...");
    app.add_option("--out", out_path, "result CSV path (default results.csv)");
    app.add_option("--trace-dir", trace_dir, "directory for per-trial trace CSVs");
    CLI::Option* threads_opt =
        app.add_option("--threads", threads, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    rissec::ExperimentSpec spec;
    rissec::SystemConfig config = rissec::default_config();
    try {
        if (!config_path.empty()) config = rissec::load_config_file(config_path, &spec);
        if (!algorithm.empty()) spec.algorithm = algorithm;
        if (trials_opt->count() > 0) spec.trials = trials;
        if (seed_opt->count() > 0) spec.seed_base = seed;
        if (threads_opt->count() > 0) spec.threads = threads;
        if (!sweep_text.empty()) parse_sweep_flag(sweep_text, spec);
        spec.trace_dir = trace_dir;
        config.validate();
    } catch (const rissec::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    try {
        const rissec::ExperimentResult result = rissec::run_experiment(spec, config);
        rissec::write_results_csv(out_path, result);

        std::printf("algorithm %s, sweep %s, %d trial(s) per value, seed %llu\n",
                    spec.algorithm.c_str(), spec.sweep_key.c_str(), spec.trials,
                    static_cast<unsigned long long>(spec.seed_base));
        for (const rissec::SweepAggregate& agg : result.aggregates) {
            std::printf("  %s = %g: mean WMSR %.6g nats, std err %.3g (%d trial(s))\n",
                        spec.sweep_key.c_str(), agg.sweep_value, agg.mean,
                        agg.std_error, agg.completed);
        }

        int failed = 0;
        const char* first_error = nullptr;
        for (const rissec::ResultRow& row : result.rows) {
            if (!row.failed) continue;
            ++failed;
            if (first_error == nullptr) first_error = row.error.c_str();
        }
        if (failed > 0)
            std::fprintf(stderr, "warning: %d trial(s) failed, first error: %s\n",
                         failed, first_error);
        std::printf("wrote %s\n", out_path.c_str());
        if (failed == static_cast<int>(result.rows.size())) return 2;
        return 0;
    } catch (const rissec::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
