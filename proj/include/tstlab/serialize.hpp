#pragma once

// JSON and CSV emission for the CLI: summaries as JSON (self-describing,
// with a format version and the resolved configuration), bulk per-trial
// data as CSV. CSV floats use 17 significant digits so values round-trip
// exactly.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tstlab/bounds.hpp"
#include "tstlab/montecarlo.hpp"

namespace tstlab {

inline constexpr const char* kFormatVersion = "1.0";

// %.17g rendering used in all CSV output.
std::string format_double(double x);

nlohmann::json to_json(const WalkParams& params);
nlohmann::json to_json(const EstimatorConfig& est);
nlohmann::json to_json(const BoundReport& report);
nlohmann::json to_json(const RegimeCheck& check);
nlohmann::json to_json(const ExperimentSummary& summary);
nlohmann::json to_json(const TailCheckResult& result);

// Envelope shared by every JSON-emitting command:
// { "spec_version": "1.0", "command": ..., "config": ..., "result": ... }
nlohmann::json make_envelope(const std::string& command, nlohmann::json config,
                             nlohmann::json result);

// Header: trial_index,tau,eta,abs_dev,overshoot_x,overshoot_xhat,
// censored_tau,censored_eta. One row per trial, in trial-index order.
void write_trials_csv(std::ostream& os, const std::vector<TrialOutcome>& trials);

// One row per grid point, in grid order: parameters, seed, empirical
// statistics, bracket, ratio to the main term, verdict.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace tstlab
