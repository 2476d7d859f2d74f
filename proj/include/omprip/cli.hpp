#pragma once

// Command-line front end. Exit codes: 0 success, 1 a verification failed
// (a counterexample flag, a lemma bound, a sufficiency violation or an
// unrecovered signal), 2 usage, I/O or numerical error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "omprip/csv.hpp"
#include "omprip/error.hpp"
#include "omprip/experiments.hpp"
#include "omprip/omp.hpp"
#include "omprip/report.hpp"
#include "omprip/ric.hpp"
#include "omprip/sharpness.hpp"

namespace omprip::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_verification_failed = 1;
inline constexpr int exit_usage = 2;

namespace detail {

struct OutputOptions {
    std::string out_path;
    bool no_timestamp = false;
};

inline void add_output_options(CLI::App* cmd, OutputOptions& o)
{
    cmd->add_option("--out", o.out_path, "Write the report to FILE instead of stdout");
    cmd->add_flag("--no-timestamp", o.no_timestamp, "Omit the timestamp field (byte-reproducible reports)");
}

inline void emit(const std::string& text, const OutputOptions& o, std::ostream& out)
{
    if (o.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.out_path);
    if (!file) {
        throw error(errc::io_error, "cannot open '" + o.out_path + "' for writing");
    }
    file << text;
}

inline void emit_json(const report::json& j, const OutputOptions& o, std::ostream& out)
{
    emit(j.dump(2) + "\n", o, out);
}

inline std::string sweep_csv(const ExperimentResult& r)
{
    std::ostringstream os;
    os << "matrix_index,matrix_seed,delta_s_plus_1,delta_is_exact,recovery_rate,trials,condition_satisfied\n";
    for (const auto& row : r.rows) {
        os << row.matrix_index << ',' << row.matrix_seed << ',' << csv::format_double(row.delta_s_plus_1) << ','
           << (row.delta_is_exact ? "true" : "false") << ',' << csv::format_double(row.recovery_rate) << ','
           << row.trials << ',' << (row.condition_satisfied ? "true" : "false") << '\n';
    }
    return os.str();
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Orthogonal Matching Pursuit and restricted isometry constant toolkit", "omprip"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(library_version));

    int status = exit_ok;

    // ric ------------------------------------------------------------------
    auto* ric_cmd = app.add_subcommand("ric", "Compute the restricted isometry constant of a matrix");
    std::string ric_matrix;
    std::size_t ric_order = 0;
    std::uint64_t ric_mc = 0;
    std::uint64_t ric_seed = 0;
    std::uint64_t ric_cap = default_enumeration_cap;
    detail::OutputOptions ric_out;
    ric_cmd->add_option("--matrix", ric_matrix, "Matrix CSV")->required();
    ric_cmd->add_option("--order", ric_order, "Sparsity order s")->required();
    ric_cmd->add_option("--mc", ric_mc, "Sample TRIALS random supports for a lower bound instead of enumerating");
    ric_cmd->add_option("--seed", ric_seed, "Seed for --mc");
    ric_cmd->add_option("--cap", ric_cap, "Maximum number of supports to enumerate");
    detail::add_output_options(ric_cmd, ric_out);
    ric_cmd->callback([&] {
        const auto a = csv::load_matrix(ric_matrix);
        const auto r = ric_mc > 0 ? ric_lower_bound_mc(a, ric_order, ric_mc, ric_seed) : ric_exact(a, ric_order, ric_cap);
        report::json config = {{"matrix", ric_matrix}, {"order", ric_order}};
        if (ric_mc > 0) {
            config["mc_trials"] = ric_mc;
            config["seed"] = ric_seed;
        }
        detail::emit_json(report::envelope(std::move(config), report::to_json(r), !ric_out.no_timestamp), ric_out, out);
    });

    // omp ------------------------------------------------------------------
    auto* omp_cmd = app.add_subcommand("omp", "Run Orthogonal Matching Pursuit and print the trace");
    std::string omp_matrix;
    std::string omp_signal;
    std::string omp_rhs;
    std::optional<std::size_t> omp_iters;
    std::string omp_tie = "low";
    double omp_residual_tol = default_residual_tolerance;
    double omp_tie_tol = default_tie_tolerance;
    double omp_recovery_tol = 1e-8;
    detail::OutputOptions omp_out;
    omp_cmd->add_option("--matrix", omp_matrix, "Matrix CSV")->required();
    auto* sig_opt = omp_cmd->add_option("--signal", omp_signal, "Signal CSV; measurements are b = A x");
    auto* rhs_opt = omp_cmd->add_option("--rhs", omp_rhs, "Measurement vector CSV");
    sig_opt->excludes(rhs_opt);
    omp_cmd->add_option("--iters", omp_iters, "Iterations (default: signal sparsity, or min(rows, cols))");
    omp_cmd->add_option("--tie", omp_tie, "Tie-break rule: low | high | rand:SEED");
    omp_cmd->add_option("--residual-tol", omp_residual_tol, "Early-exit residual tolerance (relative)");
    omp_cmd->add_option("--tie-tol", omp_tie_tol, "Relative tolerance for argmax ties");
    omp_cmd->add_option("--recovery-tol", omp_recovery_tol, "Tolerance for the recovery check");
    detail::add_output_options(omp_cmd, omp_out);
    omp_cmd->callback([&] {
        if (omp_signal.empty() == omp_rhs.empty()) {
            throw CLI::ValidationError("omp", "exactly one of --signal or --rhs is required");
        }
        const auto a = csv::load_matrix(omp_matrix);
        std::optional<SparseSignal> truth;
        Vector b;
        if (!omp_signal.empty()) {
            truth = csv::load_signal(omp_signal, a.cols());
            b = multiply(a, truth->to_dense());
        } else {
            b = csv::load_vector(omp_rhs);
        }
        OmpOptions opts;
        opts.max_iterations = omp_iters.value_or(truth ? truth->sparsity() : std::min(a.rows(), a.cols()));
        opts.tie_break = report::parse_tie_break(omp_tie);
        opts.residual_tol = omp_residual_tol;
        opts.tie_tol = omp_tie_tol;
        const auto trace = run_omp(a, b, opts);

        report::json config = {{"matrix", omp_matrix},
                               {"iterations", opts.max_iterations},
                               {"tie_break", to_string(opts.tie_break)},
                               {"residual_tol", opts.residual_tol},
                               {"tie_tol", opts.tie_tol}};
        report::json results = {{"trace", report::to_json(trace)}};
        if (truth) {
            config["signal"] = omp_signal;
            const bool recovered = check_recovery(trace.final_estimate, *truth, omp_recovery_tol);
            results["truth"] = report::to_json(*truth);
            results["recovered"] = recovered;
            if (!recovered) {
                status = exit_verification_failed;
            }
        } else {
            config["rhs"] = omp_rhs;
        }
        detail::emit_json(report::envelope(std::move(config), std::move(results), !omp_out.no_timestamp), omp_out, out);
    });

    // counterexample -------------------------------------------------------
    auto* ce_cmd = app.add_subcommand("counterexample", "Build and verify the extremal matrix for sparsity s");
    std::size_t ce_s = 0;
    std::string ce_emit_matrix;
    std::string ce_emit_signal;
    detail::OutputOptions ce_out;
    ce_cmd->add_option("--s", ce_s, "Sparsity s >= 1")->required();
    ce_cmd->add_option("--emit-matrix", ce_emit_matrix, "Also write the matrix as CSV");
    ce_cmd->add_option("--emit-signal", ce_emit_signal, "Also write the adversarial signal as CSV");
    detail::add_output_options(ce_cmd, ce_out);
    ce_cmd->callback([&] {
        const auto bundle = build_counterexample(ce_s);
        if (!ce_emit_matrix.empty()) {
            csv::save_matrix(ce_emit_matrix, bundle.matrix);
        }
        if (!ce_emit_signal.empty()) {
            csv::save_signal(ce_emit_signal, bundle.adversarial_signal);
        }
        const auto check = verify_counterexample(bundle);
        const auto eig = counterexample_eigen_residuals(bundle);
        if (!check.all()) {
            status = exit_verification_failed;
        }
        detail::emit_json(report::envelope({{"s", ce_s}}, report::to_json(bundle, check, eig), !ce_out.no_timestamp),
                          ce_out, out);
    });

    // verify-lemmas --------------------------------------------------------
    auto* vl_cmd = app.add_subcommand("verify-lemmas", "Run the identity and dominance suites");
    std::size_t vl_s_max = 12;
    std::uint64_t vl_trials = 1000;
    std::uint64_t vl_seed = 0;
    std::uint64_t vl_matrices = 10;
    std::uint64_t vl_signals = 50;
    detail::OutputOptions vl_out;
    vl_cmd->add_option("--s-max", vl_s_max, "Largest s to test");
    vl_cmd->add_option("--trials", vl_trials, "Random instances per s for the identity suite");
    vl_cmd->add_option("--seed", vl_seed, "Master seed");
    vl_cmd->add_option("--matrices", vl_matrices, "Candidate matrices per s for the dominance suite");
    vl_cmd->add_option("--signals", vl_signals, "Signals per certified matrix for the dominance suite");
    detail::add_output_options(vl_cmd, vl_out);
    vl_cmd->callback([&] {
        if (vl_s_max < 1) {
            throw CLI::ValidationError("--s-max", "must be at least 1");
        }
        const auto one = lemma1_suite(vl_s_max, vl_trials, vl_seed);
        const auto two = lemma2_suite(vl_s_max, vl_matrices, vl_signals, mix_seed(vl_seed, 2));
        if (!one.passed() || !two.passed()) {
            status = exit_verification_failed;
        }
        report::json config = {{"s_max", vl_s_max},
                               {"trials", vl_trials},
                               {"seed", vl_seed},
                               {"matrices", vl_matrices},
                               {"signals", vl_signals}};
        report::json results = {{"identity", report::to_json(one)}, {"dominance", report::to_json(two)}};
        detail::emit_json(report::envelope(std::move(config), std::move(results), !vl_out.no_timestamp), vl_out, out);
    });

    // sweep ----------------------------------------------------------------
    auto* sw_cmd = app.add_subcommand("sweep", "Recovery-rate experiment over a random matrix ensemble");
    std::string sw_config;
    std::string sw_format;
    detail::OutputOptions sw_out;
    sw_cmd->add_option("--config", sw_config, "Experiment config (JSON)")->required();
    sw_cmd->add_option("--format", sw_format, "Override output_format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    detail::add_output_options(sw_cmd, sw_out);
    sw_cmd->callback([&] {
        std::ifstream in(sw_config);
        if (!in) {
            throw error(errc::io_error, "cannot open '" + sw_config + "' for reading");
        }
        report::json raw;
        try {
            raw = report::json::parse(in);
        } catch (const report::json::exception& e) {
            throw error(errc::parse_error, sw_config + ": " + e.what());
        }
        auto cfg = report::parse_config(raw);
        if (!sw_format.empty()) {
            cfg.csv_output = sw_format == "csv";
        }
        const auto result = run_recovery_experiment(cfg);
        if (result.violations > 0) {
            status = exit_verification_failed;
        }
        if (cfg.csv_output) {
            detail::emit(detail::sweep_csv(result), sw_out, out);
            return;
        }
        report::json rows = report::json::array();
        for (const auto& row : result.rows) {
            rows.push_back(report::to_json(row));
        }
        report::json results = {{"threshold", recovery_threshold(cfg.sparsity)},
                                {"certified_matrices", result.certified},
                                {"sufficiency_violations", result.violations},
                                {"rows", std::move(rows)}};
        detail::emit_json(report::envelope(report::to_json(cfg), std::move(results), !sw_out.no_timestamp), sw_out,
                          out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    } catch (const error& e) {
        err << "omprip: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "omprip: " << e.what() << '\n';
        return exit_usage;
    }
    return status;
}

} // namespace omprip::cli
