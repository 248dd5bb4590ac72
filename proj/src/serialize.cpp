#include "tstlab/serialize.hpp"

#include <cstdio>
#include <ostream>

namespace tstlab {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json to_json(const WalkParams& params) {
    return {
        {"s", params.s},
        {"eps", params.eps},
        {"l", params.l},
        {"mode", to_string(params.mode)},
        {"dt", params.dt},
        {"t_max", params.horizon_steps()},
    };
}

nlohmann::json to_json(const EstimatorConfig& est) {
    return {{"c", est.c}};
}

nlohmann::json to_json(const BoundReport& report) {
    return {
        {"mode", to_string(report.mode)},
        {"upper", report.upper},
        {"lower", report.lower},
        {"lower_best_n", report.lower_best_n},
        {"main_term", report.main_term},
        {"upper_ok", report.upper_ok},
        {"lower_ok", report.lower_ok},
        {"violation", report.violation},
    };
}

nlohmann::json to_json(const RegimeCheck& check) {
    return {
        {"drift_scale", check.drift_scale},
        {"noise_scale", check.noise_scale},
        {"ratio_ok", check.ratio_ok},
    };
}

nlohmann::json to_json(const ExperimentSummary& summary) {
    return {
        {"n_trials", summary.n_trials},
        {"n_censored", summary.n_censored},
        {"mean_abs_dev", summary.mean_abs_dev},
        {"se_abs_dev", summary.se_abs_dev},
        {"ci_halfwidth_abs_dev", summary.ci_halfwidth_abs_dev},
        {"mean_pos_dev", summary.mean_pos_dev},
        {"se_pos_dev", summary.se_pos_dev},
        {"mean_dev", summary.mean_dev},
        {"prob_eta_early", summary.prob_eta_early},
        {"mean_overshoot", summary.mean_overshoot},
        {"mean_sq_overshoot", summary.mean_sq_overshoot},
        {"mean_tau", summary.mean_tau},
        {"se_tau", summary.se_tau},
        {"bounds", to_json(summary.bound_report)},
        {"verdict", to_string(summary.verdict)},
    };
}

nlohmann::json to_json(const TailCheckResult& result) {
    return {
        {"h", result.h},
        {"checkpoints", result.checkpoints},
        {"survival", result.survival},
        {"survivors", result.survivors},
        {"slope", result.slope},
        {"slope_stderr", result.slope_stderr},
        {"low_tail_counts", result.low_tail_counts},
        {"trunc_horizons", result.trunc_horizons},
        {"trunc_sqrt_means", result.trunc_sqrt_means},
    };
}

nlohmann::json make_envelope(const std::string& command, nlohmann::json config,
                             nlohmann::json result) {
    return {
        {"spec_version", kFormatVersion},
        {"command", command},
        {"config", std::move(config)},
        {"result", std::move(result)},
    };
}

void write_trials_csv(std::ostream& os, const std::vector<TrialOutcome>& trials) {
    os << "trial_index,tau,eta,abs_dev,overshoot_x,overshoot_xhat,censored_tau,censored_eta\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const TrialOutcome& t = trials[i];
        os << i << ',' << format_double(t.tau) << ',' << format_double(t.eta) << ','
           << format_double(t.abs_dev()) << ',' << format_double(t.overshoot_x) << ','
           << format_double(t.overshoot_xhat) << ',' << (t.censored_tau ? 1 : 0) << ','
           << (t.censored_eta ? 1 : 0) << '\n';
    }
}

namespace {

// Minimal CSV field quoting for free-text columns (error messages).
std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "l,s,eps,c,row_seed,n_trials,n_censored,mean_abs_dev,se_abs_dev,"
          "ci_halfwidth_abs_dev,lower,lower_best_n,upper,main_term,ratio_to_main_term,"
          "verdict,failed,error\n";
    for (const SweepRow& row : rows) {
        os << format_double(row.point.l) << ',' << format_double(row.point.s) << ','
           << format_double(row.point.eps) << ',' << format_double(row.resolved_c) << ','
           << row.row_seed << ',';
        if (row.failed) {
            os << "0,0,nan,nan,nan,nan,0,nan,nan,nan,,1," << csv_quote(row.error) << '\n';
            continue;
        }
        const ExperimentSummary& s = row.summary;
        os << s.n_trials << ',' << s.n_censored << ',' << format_double(s.mean_abs_dev) << ','
           << format_double(s.se_abs_dev) << ',' << format_double(s.ci_halfwidth_abs_dev) << ','
           << format_double(s.bound_report.lower) << ',' << s.bound_report.lower_best_n << ','
           << format_double(s.bound_report.upper) << ',' << format_double(s.bound_report.main_term)
           << ',' << format_double(row.ratio_to_main_term) << ',' << to_string(s.verdict)
           << ",0,\"\"\n";
    }
}

}  // namespace tstlab
