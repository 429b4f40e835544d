// JSON (de)serialization of scenarios and reports, plus small CSV helpers.
//
// Wire format (schema_version 1): complex numbers are [re, im] pairs, matrices
// are row-major nested arrays of such pairs.  Key order is fixed so that a run
// with a fixed seed produces byte-identical output.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsit/scenarios.hpp"
#include "nsit/witness.hpp"

namespace nsit {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("matrix_from_json: expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.at(0).size());
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<size_t>(r));
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("matrix_from_json: ragged rows");
    for (int c = 0; c < cols; ++c) {
      const Json& cell = row.at(static_cast<size_t>(c));
      if (!cell.is_array() || cell.size() != 2)
        throw std::invalid_argument("matrix_from_json: entries must be [re, im] pairs");
      m(r, c) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return m;
}

inline Json scenario_to_json(const Scenario& sc) {
  Json j;
  j["dim_s"] = sc.layout.dim_s;
  j["dim_e"] = sc.layout.dim_e;
  j["rho_s0"] = matrix_to_json(sc.rho_s0.matrix());
  j["env0"] = matrix_to_json(sc.env0.matrix());
  j["u_tau0"] = matrix_to_json(sc.u_tau0);
  j["u_t_tau"] = matrix_to_json(sc.u_T_tau);
  j["m"] = matrix_to_json(sc.m.matrix());
  j["basis"] = sc.basis.ordering;
  return j;
}

inline Scenario scenario_from_json(const Json& j) {
  BipartiteLayout layout(j.at("dim_s").get<int>(), j.at("dim_e").get<int>());
  PreferredBasis basis(layout.dim_s);
  if (j.contains("basis")) basis = PreferredBasis(layout.dim_s, j.at("basis").get<std::vector<int>>());
  return Scenario(layout, DensityMatrix(matrix_from_json(j.at("rho_s0"))),
                  DensityMatrix(matrix_from_json(j.at("env0"))), matrix_from_json(j.at("u_tau0")),
                  matrix_from_json(j.at("u_t_tau")), Effect(matrix_from_json(j.at("m"))), basis);
}

inline Json probe_to_json(const JointStateProbe& probe) {
  Json j;
  j["dim_s"] = probe.layout.dim_s;
  j["dim_e"] = probe.layout.dim_e;
  j["rho_se"] = matrix_to_json(probe.rho_se.matrix());
  j["m_joint"] = matrix_to_json(probe.m_joint.matrix());
  return j;
}

inline JointStateProbe probe_from_json(const Json& j) {
  BipartiteLayout layout(j.at("dim_s").get<int>(), j.at("dim_e").get<int>());
  return JointStateProbe{layout, DensityMatrix(matrix_from_json(j.at("rho_se"))),
                         Effect(matrix_from_json(j.at("m_joint")))};
}

inline Json named_scenario_to_json(const NamedScenario& ns) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = ns.name;
  j["description"] = ns.description;
  if (std::holds_alternative<Scenario>(ns.payload))
    j["scenario"] = scenario_to_json(std::get<Scenario>(ns.payload));
  else
    j["state_probe"] = probe_to_json(std::get<JointStateProbe>(ns.payload));
  Json expected = Json::array();
  for (const ExpectedValue& e : ns.expected) {
    Json je;
    je["quantity"] = e.quantity;
    je["value"] = e.value;
    je["tolerance"] = e.tolerance;
    je["note"] = e.note;
    expected.push_back(std::move(je));
  }
  j["expected"] = std::move(expected);
  return j;
}

inline NamedScenario named_scenario_from_json(const Json& j) {
  NamedScenario ns;
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::invalid_argument("named_scenario_from_json: unsupported schema version");
  ns.name = j.value("name", std::string("unnamed"));
  ns.description = j.value("description", std::string());
  if (j.contains("scenario"))
    ns.payload = scenario_from_json(j.at("scenario"));
  else if (j.contains("state_probe"))
    ns.payload = probe_from_json(j.at("state_probe"));
  else
    throw std::invalid_argument("named_scenario_from_json: missing 'scenario' or 'state_probe'");
  if (j.contains("expected"))
    for (const Json& je : j.at("expected"))
      ns.expected.push_back({je.at("quantity").get<std::string>(), je.at("value").get<double>(),
                             je.at("tolerance").get<double>(), je.value("note", std::string())});
  return ns;
}

inline Json bound_to_json(const BoundRecord& b) {
  Json j;
  j["lhs"] = b.lhs;
  j["rhs"] = b.rhs;
  j["slack"] = b.slack;
  return j;
}

inline Json report_to_json(const WitnessReport& rep) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["p1"] = rep.p1;
  j["p2"] = rep.p2;
  j["p3"] = rep.p3;
  j["p4"] = rep.p4;
  j["w_a"] = rep.w_a;
  j["w_b"] = rep.w_b;
  j["w_c"] = rep.w_c;
  j["w_isolated"] = rep.w_isolated;
  j["r_monotone"] = rep.r_monotone;
  Json wa;
  wa["coherence_term"] = rep.wa_terms.coherence_term;
  wa["correlation_term"] = rep.wa_terms.correlation_term;
  Json wb;
  wb["chi_term"] = rep.wb_terms.chi_term;
  wb["coherence_term"] = rep.wb_terms.coherence_term;
  wb["map_mismatch_term"] = rep.wb_terms.map_mismatch_term;
  Json decomposition;
  decomposition["w_a"] = std::move(wa);
  decomposition["w_b"] = std::move(wb);
  j["decomposition"] = std::move(decomposition);
  Json bounds;
  bounds["wa_coherence"] = bound_to_json(rep.wa_bound);
  bounds["wb_coherence"] = bound_to_json(rep.wb_bound);
  j["bounds"] = std::move(bounds);
  j["chi_trace_norm"] = rep.chi_trace_norm;
  j["iq_distance"] = rep.iq_distance;
  return j;
}

// --- CSV ---------------------------------------------------------------------

// Shortest-round-trip style is locale independent with %.17g; strip nothing.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

}  // namespace nsit
