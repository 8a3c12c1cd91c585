#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "selinf/rules.hpp"
#include "selinf/simulation.hpp"

namespace selinf {

using Json = nlohmann::ordered_json;

/// Reads a CSV with a header row. The response column becomes y, the other
/// columns X in file order. Throws DataError for a missing file or column,
/// a non-numeric cell (with its row and column) or a zero-norm column under
/// unit_norm.
Dataset parse_dataset(const std::string& path, const std::string& response, bool center, bool unit_norm);
Dataset parse_dataset(std::istream& in, const std::string& response, bool center, bool unit_norm,
                      const std::string& source = "<stream>");

/// Finite values as numbers, infinities as "+inf" / "-inf", NaN as null.
Json json_real(double x);
/// Inverse of json_real. Throws DataError on anything else.
double real_from_json(const Json& j);
/// Empty for infinities and NaN.
std::string csv_real(double x);

Json to_json(const PathTrace& trace, const std::vector<std::string>& names);
/// Reads back what to_json(PathTrace) wrote (competitor sets are not kept).
PathTrace trace_from_json(const Json& j);

Json to_json(const InferenceResult& r, const std::vector<std::string>& names);
std::string results_csv(const std::vector<InferenceResult>& results, const std::vector<std::string>& names);

Json to_json(const RuleOutcome& r, const std::vector<std::string>& names);

/// Config, per-step summaries, KS checks and failure counts. Records are
/// left to records_csv.
Json to_json(const SimReport& report);
std::string records_csv(const SimReport& report);

/// Missing keys keep their SimConfig defaults; a short beta_star is padded
/// with zeros to length p. "x" (rows of numbers) supplies a custom design.
SimConfig sim_config_from_json(const Json& j);

}  // namespace selinf
