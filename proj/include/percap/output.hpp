#pragma once

// Machine-readable records emitted by the command-line front end.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "percap/lifting.hpp"
#include "percap/mc.hpp"

namespace percap {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1.0";

struct OutputRecord {
  std::string schema_version{kSchemaVersion};
  std::string command;
  Json parameters = Json::object();
  std::vector<Json> results;
  std::vector<std::string> warnings;

  Json to_json() const;
  static OutputRecord from_json(const Json& j);
};

/// Two-space indented JSON followed by a newline. Doubles are printed in their
/// shortest round-trip form, so parsing the text recovers them bit-exactly.
std::string emit_json(const OutputRecord& record);

Json to_json(const CapacityResult& r);
CapacityResult capacity_from_json(const Json& j);
Json to_json(const MCEstimate& e);
MCEstimate mc_estimate_from_json(const Json& j);

/// Ten significant digits.
std::string format_number(double v);

/// kappa,level,alpha_c,p2,q2s,gamma_sq,residual,iterations,quadrature_order
std::string capacity_csv_header();
std::string capacity_csv_row(const CapacityResult& r);
/// Reads a row written by capacity_csv_row; absent cells become empty optionals.
CapacityResult parse_capacity_csv_row(std::string_view line);

std::string mc_csv_header();
std::string mc_csv_row(const MCEstimate& e);

}  // namespace percap
