#include "percap/output.hpp"

#include <cstdio>
#include <sstream>

namespace percap {

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != '\n') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::optional<double> parse_optional_cell(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return std::stod(cell);
}

}  // namespace

Json OutputRecord::to_json() const {
  Json j;
  j["schema_version"] = schema_version;
  j["command"] = command;
  j["parameters"] = parameters;
  j["results"] = Json::array();
  for (const auto& r : results) j["results"].push_back(r);
  j["warnings"] = warnings;
  return j;
}

OutputRecord OutputRecord::from_json(const Json& j) {
  OutputRecord rec;
  rec.schema_version = j.at("schema_version").get<std::string>();
  rec.command = j.at("command").get<std::string>();
  rec.parameters = j.at("parameters");
  for (const auto& r : j.at("results")) rec.results.push_back(r);
  rec.warnings = j.at("warnings").get<std::vector<std::string>>();
  return rec;
}

std::string emit_json(const OutputRecord& record) {
  return record.to_json().dump(2) + "\n";
}

Json to_json(const CapacityResult& r) {
  Json j;
  j["type"] = "capacity";
  j["kappa"] = r.kappa;
  j["level"] = std::string(to_string(r.level));
  j["alpha_c"] = r.alpha_c;
  j["p2"] = optional_number(r.p2);
  j["q2s"] = optional_number(r.q2s);
  j["gamma_sq"] = optional_number(r.gamma_sq);
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["quadrature_order"] = r.quadrature_order;
  j["validated"] = r.validated;
  j["collapsed_to_l1"] = r.collapsed_to_l1;
  j["sign_changes"] = r.sign_changes;
  return j;
}

CapacityResult capacity_from_json(const Json& j) {
  CapacityResult r;
  r.kappa = j.at("kappa").get<double>();
  r.level = parse_lift_level(j.at("level").get<std::string>());
  r.alpha_c = j.at("alpha_c").get<double>();
  r.p2 = read_optional(j, "p2");
  r.q2s = read_optional(j, "q2s");
  r.gamma_sq = read_optional(j, "gamma_sq");
  r.residual = j.at("residual").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.quadrature_order = j.at("quadrature_order").get<int>();
  r.validated = j.value("validated", true);
  r.collapsed_to_l1 = j.value("collapsed_to_l1", false);
  r.sign_changes = j.value("sign_changes", 0);
  return r;
}

Json to_json(const MCEstimate& e) {
  Json j;
  j["type"] = "mc_estimate";
  j["n"] = e.n;
  j["m"] = e.m;
  j["alpha"] = static_cast<double>(e.m) / e.n;
  j["kappa"] = e.kappa;
  j["method"] = std::string(to_string(e.method));
  j["trials"] = e.trials;
  j["successes"] = e.successes;
  j["rate"] = e.rate;
  j["ci_lo"] = e.ci_lo;
  j["ci_hi"] = e.ci_hi;
  return j;
}

MCEstimate mc_estimate_from_json(const Json& j) {
  MCEstimate e;
  e.n = j.at("n").get<int>();
  e.m = j.at("m").get<int>();
  e.kappa = j.at("kappa").get<double>();
  e.method = parse_mc_method(j.at("method").get<std::string>());
  e.trials = j.at("trials").get<int>();
  e.successes = j.at("successes").get<int>();
  e.rate = j.at("rate").get<double>();
  e.ci_lo = j.at("ci_lo").get<double>();
  e.ci_hi = j.at("ci_hi").get<double>();
  return e;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string capacity_csv_header() {
  return "kappa,level,alpha_c,p2,q2s,gamma_sq,residual,iterations,quadrature_order";
}

std::string capacity_csv_row(const CapacityResult& r) {
  std::ostringstream os;
  os << format_number(r.kappa) << ',' << to_string(r.level) << ',' << format_number(r.alpha_c)
     << ',' << optional_cell(r.p2) << ',' << optional_cell(r.q2s) << ','
     << optional_cell(r.gamma_sq) << ',' << format_number(r.residual) << ',' << r.iterations
     << ',' << r.quadrature_order;
  return os.str();
}

CapacityResult parse_capacity_csv_row(std::string_view line) {
  const auto cells = split_csv(line);
  if (cells.size() != 9) {
    throw InvalidArgument("capacity CSV row must have 9 cells, got " +
                          std::to_string(cells.size()));
  }
  CapacityResult r;
  r.kappa = std::stod(cells[0]);
  r.level = parse_lift_level(cells[1]);
  r.alpha_c = std::stod(cells[2]);
  r.p2 = parse_optional_cell(cells[3]);
  r.q2s = parse_optional_cell(cells[4]);
  r.gamma_sq = parse_optional_cell(cells[5]);
  r.residual = std::stod(cells[6]);
  r.iterations = std::stoi(cells[7]);
  r.quadrature_order = std::stoi(cells[8]);
  return r;
}

std::string mc_csv_header() {
  return "n,m,alpha,kappa,method,trials,successes,rate,ci_lo,ci_hi";
}

std::string mc_csv_row(const MCEstimate& e) {
  std::ostringstream os;
  os << e.n << ',' << e.m << ',' << format_number(static_cast<double>(e.m) / e.n) << ','
     << format_number(e.kappa) << ',' << to_string(e.method) << ',' << e.trials << ','
     << e.successes << ',' << format_number(e.rate) << ',' << format_number(e.ci_lo) << ','
     << format_number(e.ci_hi);
  return os.str();
}

}  // namespace percap
