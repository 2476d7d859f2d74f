#pragma once

// JSON rendering of library results. Every index written here is 1-based.
// Reports share the top-level shape { config, results, versions } plus an
// optional "timestamp"; field names are lower_snake_case.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "omprip/error.hpp"
#include "omprip/experiments.hpp"
#include "omprip/omp.hpp"
#include "omprip/ric.hpp"
#include "omprip/sharpness.hpp"

namespace omprip {

inline constexpr const char* library_version = "1.0.0";
inline constexpr int report_schema_version = 1;

namespace report {

using json = nlohmann::ordered_json;

inline json one_based(const std::vector<std::size_t>& indices)
{
    json out = json::array();
    for (auto i : indices) {
        out.push_back(i + 1);
    }
    return out;
}

inline json to_json(const SparseSignal& x)
{
    return {{"dimension", x.dimension()}, {"support", one_based(x.support())}, {"values", x.values()}};
}

inline json to_json(const RicReport& r)
{
    return {{"order", r.order},
            {"delta", r.delta},
            {"is_exact", r.is_exact},
            {"worst_support", one_based(r.worst_support)},
            {"worst_eigen_low", r.worst_eigen_low},
            {"worst_eigen_high", r.worst_eigen_high},
            {"supports_examined", r.supports_examined}};
}

inline json to_json(const OmpTrace& t)
{
    json iterations = json::array();
    for (std::size_t k = 0; k < t.iterations.size(); ++k) {
        const auto& it = t.iterations[k];
        iterations.push_back({{"iteration", k + 1},
                              {"selected_index", it.selected_index + 1},
                              {"correlations", it.correlations},
                              {"tie_set", one_based(it.tie_set)},
                              {"residual_norm_after", it.residual_norm_after}});
    }
    return {{"iterations", std::move(iterations)},
            {"selected", one_based(t.selected())},
            {"final_estimate", t.final_estimate},
            {"converged", t.converged}};
}

inline json to_json(const SweepFailure& f)
{
    return {{"trial_index", f.trial_index},
            {"signal", to_json(f.signal)},
            {"tie_break", f.rule},
            {"selected", one_based(f.selected)},
            {"note", f.note}};
}

inline json to_json(const SweepReport& r)
{
    json failures = json::array();
    for (const auto& f : r.failures) {
        failures.push_back(to_json(f));
    }
    return {{"s", r.s},
            {"delta", r.delta},
            {"delta_is_exact", r.delta_is_exact},
            {"threshold", r.threshold},
            {"condition_holds", r.condition_holds},
            {"all_recovered", r.all_recovered},
            {"trials", r.trials},
            {"runs", r.runs},
            {"recovered_runs", r.recovered_runs},
            {"failures", std::move(failures)}};
}

inline json to_json(const CounterexampleBundle& b, const CounterexampleCheck& c, const EigenRelationResiduals& e)
{
    return {{"s", b.s},
            {"flags",
             {{"delta_matches", c.delta_matches},
              {"spectrum_matches", c.spectrum_matches},
              {"ties_match", c.ties_match},
              {"omp_fails_under_highest_index", c.omp_fails_under_highest_index}}},
            {"predicted_delta", b.predicted_delta},
            {"measured_delta", c.ric.delta},
            {"predicted_spectrum", b.predicted_spectrum},
            {"measured_spectrum", c.spectrum.eigenvalues},
            {"predicted_tie_value", b.predicted_tie_value},
            {"first_correlations", c.first_correlations},
            {"eigen_relation_residuals",
             {{"mean_zero", e.mean_zero}, {"plus", e.plus}, {"minus", e.minus}}},
            {"adversarial_signal", to_json(b.adversarial_signal)},
            {"highest_index_recovered", c.highest_index_recovered},
            {"highest_index_trace", to_json(c.highest_index_trace)}};
}

inline json to_json(const LemmaOneSuiteResult& r)
{
    return {{"instances", r.instances},
            {"max_scaled_residual", r.max_scaled_residual},
            {"bound", r.bound},
            {"max_scaled_residual_by_s", r.max_scaled_residual_by_s},
            {"passed", r.passed()}};
}

inline json to_json(const LemmaTwoSuiteResult& r)
{
    return {{"candidates", r.candidates},
            {"certified_matrices", r.certified_matrices},
            {"certified_by_s", r.certified_by_s},
            {"signals", r.signals},
            {"min_margin", r.certified_matrices == 0 ? json(nullptr) : json(r.min_margin)},
            {"boundary_margin_by_s", r.boundary_margin_by_s},
            {"boundary_tol", r.boundary_tol},
            {"passed", r.passed()}};
}

inline json to_json(const RecoveryRateRow& row)
{
    json failures = json::array();
    for (const auto& f : row.failures) {
        failures.push_back(to_json(f));
    }
    return {{"matrix_index", row.matrix_index},
            {"matrix_seed", row.matrix_seed},
            {"delta_s_plus_1", row.delta_s_plus_1},
            {"delta_is_exact", row.delta_is_exact},
            {"recovery_rate", row.recovery_rate},
            {"trials", row.trials},
            {"condition_satisfied", row.condition_satisfied},
            {"failures", std::move(failures)}};
}

// ---------------------------------------------------------------------------
// Tie-break rule text form: low | high | rand:SEED

inline TieBreakRule parse_tie_break(const std::string& text)
{
    if (text == "low") {
        return LowestIndex{};
    }
    if (text == "high") {
        return HighestIndex{};
    }
    if (text.rfind("rand:", 0) == 0) {
        const auto digits = text.substr(5);
        if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
            try {
                return SeededRandom{std::stoull(digits)};
            } catch (const std::out_of_range&) {
            }
        }
    }
    throw error(errc::parse_error, "tie-break rule must be low, high or rand:SEED, got '" + text + "'");
}

// ---------------------------------------------------------------------------
// Experiment config

inline ExperimentConfig parse_config(const json& j)
{
    ExperimentConfig c;
    try {
        c.master_seed = j.value("master_seed", c.master_seed);
        c.rows = j.value("rows", c.rows);
        c.cols = j.value("cols", c.cols);
        c.sparsity = j.value("sparsity", c.sparsity);
        const auto ensemble = j.value("ensemble", std::string("gaussian"));
        if (ensemble == "gaussian") {
            c.ensemble = Ensemble::gaussian;
        } else if (ensemble == "sign_bernoulli") {
            c.ensemble = Ensemble::sign_bernoulli;
        } else {
            throw error(errc::parse_error, "ensemble must be gaussian or sign_bernoulli");
        }
        c.normalize_columns = j.value("normalize_columns", c.normalize_columns);
        c.trials = j.value("trials", c.trials);
        const auto tie = j.value("tie_break", std::string("all"));
        if (tie != "all") {
            c.tie_break = parse_tie_break(tie);
        }
        const auto format = j.value("output_format", std::string("json"));
        if (format != "json" && format != "csv") {
            throw error(errc::parse_error, "output_format must be json or csv");
        }
        c.csv_output = format == "csv";
        c.exhaustive_supports = j.value("exhaustive_supports", c.exhaustive_supports);
        c.patterns_per_support = j.value("patterns_per_support", c.patterns_per_support);
        c.signal_trials = j.value("signal_trials", c.signal_trials);
        c.recovery_tol = j.value("recovery_tol", c.recovery_tol);
    } catch (const json::exception& e) {
        throw error(errc::parse_error, std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline json to_json(const ExperimentConfig& c)
{
    return {{"master_seed", c.master_seed},
            {"rows", c.rows},
            {"cols", c.cols},
            {"sparsity", c.sparsity},
            {"ensemble", c.ensemble == Ensemble::gaussian ? "gaussian" : "sign_bernoulli"},
            {"normalize_columns", c.normalize_columns},
            {"trials", c.trials},
            {"tie_break", c.tie_break ? to_string(*c.tie_break) : std::string("all")},
            {"output_format", c.csv_output ? "csv" : "json"},
            {"exhaustive_supports", c.exhaustive_supports},
            {"patterns_per_support", c.patterns_per_support},
            {"signal_trials", c.signal_trials},
            {"recovery_tol", c.recovery_tol}};
}

// ---------------------------------------------------------------------------
// Envelope

inline json versions()
{
    return {{"omprip", library_version}, {"report_schema", report_schema_version}};
}

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json envelope(json config, json results, bool with_timestamp)
{
    json out = {{"config", std::move(config)}, {"results", std::move(results)}, {"versions", versions()}};
    if (with_timestamp) {
        out["timestamp"] = utc_timestamp();
    }
    return out;
}

} // namespace report
} // namespace omprip
