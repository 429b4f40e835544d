// Command-line front end: run named scenarios, sweep a scenario parameter,
// run the verification suite, or list what is available.
//
// Exit codes: 0 success, 1 usage/input error, 2 scientific check failure.
// Identical (command, config, seed) always produces byte-identical output.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "nsit/serialize.hpp"
#include "nsit/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitScience = 2;

int fail_usage(const std::string& reason) {
  std::cerr << "error: " << reason << "\n";
  return kExitUsage;
}

// Writes to the output path when given, stdout otherwise.  Binary mode keeps
// the bytes exactly as produced (CSV rows carry their own CRLF).
bool emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) return false;
  out << text;
  return out.good();
}

struct ExpectedCheckRow {
  std::string quantity;
  double expected;
  double measured;
  double tolerance;
  bool pass;
};

std::vector<ExpectedCheckRow> expected_rows(const nsit::NamedScenario& ns) {
  std::vector<ExpectedCheckRow> rows;
  for (const nsit::ExpectedValue& e : ns.expected) {
    const double measured = nsit::evaluate_quantity(ns, e.quantity);
    rows.push_back({e.quantity, e.value, measured, e.tolerance,
                    std::abs(measured - e.value) <= e.tolerance});
  }
  return rows;
}

nsit::Json expected_rows_to_json(const std::vector<ExpectedCheckRow>& rows) {
  nsit::Json arr = nsit::Json::array();
  for (const ExpectedCheckRow& r : rows) {
    nsit::Json j;
    j["quantity"] = r.quantity;
    j["expected"] = r.expected;
    j["measured"] = r.measured;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

// Column registries (documented in README.md).  Order is fixed.
const std::vector<std::string>& scenario_run_columns() {
  static const std::vector<std::string> cols = {
      "name",           "p1",
      "p2",             "p3",
      "p4",             "w_a",
      "w_b",            "w_c",
      "w_isolated",     "r_monotone",
      "wa_coherence_term", "wa_correlation_term",
      "wb_chi_term",    "wb_coherence_term",
      "wb_map_mismatch_term", "chi_trace_norm",
      "iq_distance",    "wa_bound_slack",
      "wb_bound_slack"};
  return cols;
}

const std::vector<std::string>& probe_run_columns() {
  static const std::vector<std::string> cols = {"name", "w_a", "iq_distance", "chi_trace_norm",
                                                "ppt_min_eig"};
  return cols;
}

std::vector<std::string> scenario_run_values(const std::string& name,
                                             const nsit::WitnessReport& rep) {
  using nsit::format_double;
  return {name,
          format_double(rep.p1),
          format_double(rep.p2),
          format_double(rep.p3),
          format_double(rep.p4),
          format_double(rep.w_a),
          format_double(rep.w_b),
          format_double(rep.w_c),
          format_double(rep.w_isolated),
          format_double(rep.r_monotone),
          format_double(rep.wa_terms.coherence_term),
          format_double(rep.wa_terms.correlation_term),
          format_double(rep.wb_terms.chi_term),
          format_double(rep.wb_terms.coherence_term),
          format_double(rep.wb_terms.map_mismatch_term),
          format_double(rep.chi_trace_norm),
          format_double(rep.iq_distance),
          format_double(rep.wa_bound.slack),
          format_double(rep.wb_bound.slack)};
}

nsit::Json probe_report_json(const nsit::NamedScenario& ns) {
  nsit::Json j;
  j["w_a"] = nsit::evaluate_quantity(ns, "w_a");
  j["iq_distance"] = nsit::evaluate_quantity(ns, "iq_distance");
  j["chi_trace_norm"] = nsit::evaluate_quantity(ns, "chi_trace_norm");
  j["ppt_min_eig"] = nsit::evaluate_quantity(ns, "ppt_min_eig");
  return j;
}

int cmd_run(const std::string& scenario_name, const std::string& config_path,
            std::uint64_t seed, const std::string& format, const std::string& output_path) {
  if (scenario_name.empty() == config_path.empty())
    return fail_usage("run requires exactly one of --scenario or --config");

  nsit::NamedScenario ns;
  try {
    if (!scenario_name.empty()) {
      ns = nsit::named_scenario(scenario_name);
    } else {
      std::ifstream in(config_path);
      if (!in) return fail_usage("cannot open config file '" + config_path + "'");
      ns = nsit::named_scenario_from_json(nsit::Json::parse(in));
    }
  } catch (const std::exception& e) {
    return fail_usage(e.what());
  }

  std::vector<ExpectedCheckRow> checks;
  std::string text;
  try {
    checks = expected_rows(ns);
    const bool is_scenario = std::holds_alternative<nsit::Scenario>(ns.payload);
    bool all_pass = true;
    for (const ExpectedCheckRow& r : checks) all_pass = all_pass && r.pass;

    if (format == "json") {
      nsit::Json j;
      j["schema_version"] = nsit::kSchemaVersion;
      j["command"] = "run";
      j["name"] = ns.name;
      j["kind"] = is_scenario ? "scenario" : "state_probe";
      j["seed"] = seed;
      if (is_scenario)
        j["report"] = nsit::report_to_json(nsit::witness_suite(std::get<nsit::Scenario>(ns.payload)));
      else
        j["report"] = probe_report_json(ns);
      j["expected_checks"] = expected_rows_to_json(checks);
      j["all_expected_pass"] = all_pass;
      text = j.dump(2) + "\n";
    } else {
      if (is_scenario) {
        const nsit::WitnessReport rep = nsit::witness_suite(std::get<nsit::Scenario>(ns.payload));
        text = nsit::csv_row(scenario_run_columns()) +
               nsit::csv_row(scenario_run_values(ns.name, rep));
      } else {
        using nsit::format_double;
        text = nsit::csv_row(probe_run_columns()) +
               nsit::csv_row({ns.name, format_double(nsit::evaluate_quantity(ns, "w_a")),
                              format_double(nsit::evaluate_quantity(ns, "iq_distance")),
                              format_double(nsit::evaluate_quantity(ns, "chi_trace_norm")),
                              format_double(nsit::evaluate_quantity(ns, "ppt_min_eig"))});
      }
    }
  } catch (const std::exception& e) {
    return fail_usage(e.what());
  }

  if (!emit(text, output_path)) return fail_usage("cannot write output file '" + output_path + "'");
  for (const ExpectedCheckRow& r : checks)
    if (!r.pass)
      std::cerr << "expected-failure: " << ns.name << " " << r.quantity
                << " measured=" << nsit::format_double(r.measured)
                << " expected=" << nsit::format_double(r.expected)
                << " tolerance=" << nsit::format_double(r.tolerance) << "\n";
  for (const ExpectedCheckRow& r : checks)
    if (!r.pass) return kExitScience;
  return kExitOk;
}

// --- sweep -------------------------------------------------------------------

struct SweepPoint {
  double parameter;
  nsit::NamedScenario scenario;
};

const std::vector<std::string>& sweep_scenario_columns() {
  static const std::vector<std::string> cols = {"parameter", "p1", "p2",  "p3",
                                                "p4",        "w_a", "w_b", "w_c",
                                                "w_isolated", "wa_bound_slack", "wb_bound_slack"};
  return cols;
}

const std::vector<std::string>& sweep_probe_columns() {
  static const std::vector<std::string> cols = {"parameter", "w_a", "iq_distance",
                                                "chi_trace_norm", "ppt_min_eig"};
  return cols;
}

int cmd_sweep(const std::string& config_path, std::uint64_t seed, const std::string& format,
              const std::string& output_path) {
  if (config_path.empty()) return fail_usage("sweep requires --config");

  std::string scenario;
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  long steps = 0;
  std::map<std::string, double> fixed;
  nsit::Json echo;
  try {
    std::ifstream in(config_path);
    if (!in) return fail_usage("cannot open config file '" + config_path + "'");
    const nsit::Json j = nsit::Json::parse(in);
    if (j.at("schema_version").get<int>() != nsit::kSchemaVersion)
      return fail_usage("unsupported schema_version");
    const nsit::Json& sw = j.at("sweep");
    scenario = sw.at("scenario").get<std::string>();
    parameter = sw.at("parameter").get<std::string>();
    start = sw.at("start").get<double>();
    stop = sw.at("stop").get<double>();
    steps = sw.at("steps").get<long>();
    if (sw.contains("fixed"))
      for (auto it = sw.at("fixed").begin(); it != sw.at("fixed").end(); ++it)
        fixed[it.key()] = it.value().get<double>();
    echo = sw;
  } catch (const std::exception& e) {
    return fail_usage(std::string("bad sweep config: ") + e.what());
  }

  if (steps < 1) return fail_usage("sweep range is empty (steps must be >= 1)");

  std::vector<double> values;
  for (long k = 0; k < steps; ++k)
    values.push_back(steps == 1 ? start
                                : start + (stop - start) * static_cast<double>(k) /
                                      static_cast<double>(steps - 1));

  auto integer_value = [](double v, long& out) {
    const double rounded = std::round(v);
    if (std::abs(v - rounded) > 1e-9) return false;
    out = static_cast<long>(rounded);
    return true;
  };

  std::vector<SweepPoint> points;
  try {
    for (double v : values) {
      if (scenario == "epsilon-mixture" && parameter == "eps") {
        long d = 2;
        if (fixed.count("d") && !integer_value(fixed.at("d"), d))
          return fail_usage("fixed d must be an integer");
        points.push_back({v, nsit::epsilon_mixture_scenario(static_cast<int>(d), v)});
      } else if (scenario == "epsilon-mixture" && parameter == "d") {
        long d = 0;
        if (!integer_value(v, d) || d < 2) return fail_usage("d sweep values must be integers >= 2");
        const double eps = fixed.count("eps") ? fixed.at("eps") : 0.2;
        points.push_back({v, nsit::epsilon_mixture_scenario(static_cast<int>(d), eps)});
      } else if (scenario == "isolated-max-coherent" && parameter == "d") {
        long d = 0;
        if (!integer_value(v, d) || d < 2) return fail_usage("d sweep values must be integers >= 2");
        points.push_back({v, nsit::isolated_max_coherent_scenario(static_cast<int>(d))});
      } else {
        return fail_usage("unsupported sweep: scenario '" + scenario + "' parameter '" +
                          parameter + "'");
      }
    }
  } catch (const std::exception& e) {
    return fail_usage(e.what());
  }

  const bool probe_kind = std::holds_alternative<nsit::JointStateProbe>(points.front().scenario.payload);
  const std::vector<std::string>& columns =
      probe_kind ? sweep_probe_columns() : sweep_scenario_columns();

  std::vector<std::vector<double>> rows;
  try {
    for (const SweepPoint& pt : points) {
      if (probe_kind) {
        rows.push_back({pt.parameter, nsit::evaluate_quantity(pt.scenario, "w_a"),
                        nsit::evaluate_quantity(pt.scenario, "iq_distance"),
                        nsit::evaluate_quantity(pt.scenario, "chi_trace_norm"),
                        nsit::evaluate_quantity(pt.scenario, "ppt_min_eig")});
      } else {
        const nsit::WitnessReport rep =
            nsit::witness_suite(std::get<nsit::Scenario>(pt.scenario.payload));
        rows.push_back({pt.parameter, rep.p1, rep.p2, rep.p3, rep.p4, rep.w_a, rep.w_b, rep.w_c,
                        rep.w_isolated, rep.wa_bound.slack, rep.wb_bound.slack});
      }
    }
  } catch (const std::exception& e) {
    return fail_usage(e.what());
  }

  std::string text;
  if (format == "json") {
    nsit::Json j;
    j["schema_version"] = nsit::kSchemaVersion;
    j["command"] = "sweep";
    j["seed"] = seed;
    j["sweep"] = echo;
    j["columns"] = columns;
    nsit::Json out_rows = nsit::Json::array();
    for (const auto& row : rows) out_rows.push_back(row);
    j["rows"] = std::move(out_rows);
    text = j.dump(2) + "\n";
  } else {
    text = nsit::csv_row(columns);
    for (const auto& row : rows) {
      std::vector<std::string> fields;
      for (double v : row) fields.push_back(nsit::format_double(v));
      text += nsit::csv_row(fields);
    }
  }

  if (!emit(text, output_path)) return fail_usage("cannot write output file '" + output_path + "'");
  return kExitOk;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(std::uint64_t seed, const std::string& only,
               const std::vector<std::string>& tolerance_args, const std::string& format,
               const std::string& output_path) {
  nsit::ToleranceOverrides overrides;
  for (const std::string& arg : tolerance_args) {
    const size_t eq = arg.find('=');
    if (eq == std::string::npos || eq == 0)
      return fail_usage("bad --tolerance '" + arg + "' (expected name=value)");
    const std::string name = arg.substr(0, eq);
    try {
      size_t used = 0;
      const double value = std::stod(arg.substr(eq + 1), &used);
      if (used != arg.size() - eq - 1) throw std::invalid_argument("trailing characters");
      overrides[name] = value;
    } catch (const std::exception&) {
      return fail_usage("bad --tolerance value in '" + arg + "'");
    }
  }

  const std::vector<nsit::CheckResult> results = nsit::run_checks(seed, overrides, only);
  if (results.empty()) return fail_usage("--only '" + only + "' matches no check");

  bool all_pass = true;
  std::ostringstream lines;
  for (const nsit::CheckResult& res : results) {
    lines << nsit::render_check_line(res) << "\n";
    all_pass = all_pass && res.pass;
  }
  lines << "verify: " << [&] {
    int n = 0;
    for (const auto& r : results) n += r.pass ? 1 : 0;
    return n;
  }() << "/" << results.size() << " checks passed (seed " << seed << ")\n";
  std::cout << lines.str();

  if (!output_path.empty()) {
    std::string text;
    if (format == "json") {
      nsit::Json j;
      j["schema_version"] = nsit::kSchemaVersion;
      j["command"] = "verify";
      j["seed"] = seed;
      j["only"] = only;
      nsit::Json checks = nsit::Json::array();
      for (const nsit::CheckResult& res : results) {
        nsit::Json c;
        c["name"] = res.name;
        c["pass"] = res.pass;
        nsit::Json details = nsit::Json::array();
        for (const nsit::CheckDetail& d : res.details) {
          nsit::Json dj;
          dj["label"] = d.label;
          dj["measured"] = d.measured;
          dj["expected"] = d.expected;
          dj["tolerance"] = d.tolerance;
          dj["relation"] = nsit::relation_symbol(d.relation);
          dj["pass"] = d.pass;
          details.push_back(std::move(dj));
        }
        c["details"] = std::move(details);
        checks.push_back(std::move(c));
      }
      j["checks"] = std::move(checks);
      j["all_pass"] = all_pass;
      text = j.dump(2) + "\n";
    } else {
      text = nsit::csv_row({"check", "label", "measured", "expected", "tolerance", "relation",
                            "pass"});
      for (const nsit::CheckResult& res : results)
        for (const nsit::CheckDetail& d : res.details)
          text += nsit::csv_row({res.name, d.label, nsit::format_double(d.measured),
                                 nsit::format_double(d.expected), nsit::format_double(d.tolerance),
                                 nsit::relation_symbol(d.relation), d.pass ? "true" : "false"});
    }
    if (!emit(text, output_path))
      return fail_usage("cannot write output file '" + output_path + "'");
  }
  return all_pass ? kExitOk : kExitScience;
}

int cmd_list(const std::string& format, const std::string& output_path) {
  std::string text;
  if (format == "json") {
    nsit::Json j;
    j["schema_version"] = nsit::kSchemaVersion;
    j["scenarios"] = nsit::scenario_names();
    j["checks"] = nsit::check_names();
    text = j.dump(2) + "\n";
  } else if (format == "csv") {
    text = nsit::csv_row({"kind", "name"});
    for (const std::string& s : nsit::scenario_names()) text += nsit::csv_row({"scenario", s});
    for (const std::string& c : nsit::check_names()) text += nsit::csv_row({"check", c});
  } else {
    text = "scenarios:\n";
    for (const std::string& s : nsit::scenario_names()) text += "  " + s + "\n";
    text += "checks:\n";
    for (const std::string& c : nsit::check_names()) text += "  " + c + "\n";
  }
  if (!emit(text, output_path)) return fail_usage("cannot write output file '" + output_path + "'");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherence-witness laboratory for two-point measurement protocols"};
  app.require_subcommand(1);

  std::string scenario;
  std::string config_path;
  std::string output_path;
  std::string only;
  std::uint64_t seed = 1234;
  std::vector<std::string> tolerance_args;

  CLI::App* run = app.add_subcommand("run", "Evaluate one scenario and emit a report");
  run->add_option("--scenario", scenario, "Built-in scenario name (see `list`)");
  run->add_option("--config", config_path, "Path to a scenario JSON file");
  std::string run_format = "json";
  run->add_option("--format", run_format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--seed", seed, "Random seed (recorded in the report)");
  run->add_option("--output", output_path, "Output file (default: stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter from a config file");
  sweep->add_option("--config", config_path, "Path to a sweep JSON file")->required();
  std::string sweep_format = "csv";
  sweep->add_option("--format", sweep_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sweep->add_option("--seed", seed, "Random seed (recorded in JSON output)");
  sweep->add_option("--output", output_path, "Output file (default: stdout)");

  CLI::App* verify = app.add_subcommand("verify", "Run the named verification checks");
  verify->add_option("--seed", seed, "Seed for all randomized checks");
  verify->add_option("--only", only, "Run only checks whose name contains this substring");
  verify->add_option("--tolerance", tolerance_args,
                     "Override a check tolerance, e.g. --tolerance diamond-norm=1e-2");
  std::string verify_format = "json";
  verify->add_option("--format", verify_format, "Report file format")
      ->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--output", output_path, "Report file (stdout always gets the text summary)");

  CLI::App* list = app.add_subcommand("list", "List built-in scenarios and checks");
  std::string list_format = "text";
  list->add_option("--format", list_format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  list->add_option("--output", output_path, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (run->parsed()) return cmd_run(scenario, config_path, seed, run_format, output_path);
  if (sweep->parsed()) return cmd_sweep(config_path, seed, sweep_format, output_path);
  if (verify->parsed()) return cmd_verify(seed, only, tolerance_args, verify_format, output_path);
  return cmd_list(list_format, output_path);
}
