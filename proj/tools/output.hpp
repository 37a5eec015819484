#pragma once

// Serialization of results for the command-line tool. All floating-point
// values are written with 9 significant digits; JSON objects keep their keys
// in lexicographic order.

#include <string>
#include <vector>

#include <json.hpp>

#include "weakrand/bound_oracle.hpp"
#include "weakrand/keyrate.hpp"
#include "weakrand/optimizer.hpp"
#include "weakrand/simulator.hpp"

namespace weakrand::cli {

using Json = nlohmann::json;

/// "%.9g" text of x.
std::string format9(double x);

/// x rounded to 9 significant digits, so that the shortest round-trip
/// representation written by the JSON serializer is stable.
double round9(double x);

/// Pretty-printed JSON with a trailing newline.
std::string dump_json(const Json& j);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

/// Header row plus one data row from a (possibly nested) JSON object, with
/// nested keys joined by '.'.
std::string flatten_to_csv(const Json& object);

Json to_json(const KeyRateResult& r);
Json to_json(const DeviationParams& dev);
Json to_json(const HiddenVariableModel& hv);
Json to_json(const PauliChannel& ch);
Json to_json(const TwoStepScenario& sc);
Json to_json(const SolverReport& rep);
Json to_json(const OptimizationResult& r);
Json to_json(const OracleReport& r);
Json to_json(const Estimate& e);
Json to_json(const SimReport& r);

/// Per-pulse dump: header `lambda0,lambda1,x0,x1,y,bob_bit,sifted,eve_guess`.
std::string pulse_csv_header();
std::string pulse_csv_row(const PulseRecord& r);

}  // namespace weakrand::cli
