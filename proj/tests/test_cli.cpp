// End-to-end tests of the installed binary: every invocation here goes through
// std::system on the real executable, exactly as a user would call it.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "nsit/serialize.hpp"
#include "nsit/verify.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "nsit_cli_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

fs::path scratch_file(const std::string& stem) {
  static int counter = 0;
  return scratch_dir() / (stem + "_" + std::to_string(counter++));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

CliResult run_cli(const std::string& args) {
  const fs::path out_path = scratch_file("stdout");
  const fs::path err_path = scratch_file("stderr");
  const std::string command = std::string("\"") + NSIT_CLI_PATH + "\" " + args + " > \"" +
                              out_path.string() + "\" 2> \"" + err_path.string() + "\"";
  const int status = std::system(command.c_str());
  CliResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  return res;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  // good enough for our own output: fields never contain commas or CRLF
  std::vector<std::vector<std::string>> rows;
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t end = text.find("\r\n", pos);
    REQUIRE(end != std::string::npos);  // every row must be CRLF-terminated
    const std::string line = text.substr(pos, end - pos);
    pos = end + 2;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.empty() || line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("list enumerates scenarios and checks in all formats") {
  const CliResult text = run_cli("list");
  REQUIRE(text.exit_code == 0);
  REQUIRE(text.out.find("scenarios:") != std::string::npos);
  REQUIRE(text.out.find("checks:") != std::string::npos);
  for (const std::string& s : nsit::scenario_names())
    REQUIRE(text.out.find("  " + s + "\n") != std::string::npos);
  for (const std::string& c : nsit::check_names())
    REQUIRE(text.out.find("  " + c + "\n") != std::string::npos);

  const CliResult json = run_cli("list --format json");
  REQUIRE(json.exit_code == 0);
  const nsit::Json j = nsit::Json::parse(json.out);
  REQUIRE(j.at("schema_version").get<int>() == nsit::kSchemaVersion);
  REQUIRE(j.at("scenarios").get<std::vector<std::string>>() == nsit::scenario_names());
  REQUIRE(j.at("checks").get<std::vector<std::string>>() == nsit::check_names());

  const CliResult csv = run_cli("list --format csv");
  REQUIRE(csv.exit_code == 0);
  const auto rows = parse_csv(csv.out);
  REQUIRE(rows.size() == 1 + nsit::scenario_names().size() + nsit::check_names().size());
  REQUIRE(rows[0] == std::vector<std::string>{"kind", "name"});
  REQUIRE(rows[1][0] == "scenario");
  REQUIRE(rows.back()[0] == "check");
}

TEST_CASE("run emits a full report for a built-in scenario") {
  const CliResult res = run_cli("run --scenario bell --seed 9");
  INFO(res.err);
  REQUIRE(res.exit_code == 0);
  const nsit::Json j = nsit::Json::parse(res.out);
  REQUIRE(j.at("schema_version").get<int>() == nsit::kSchemaVersion);
  REQUIRE(j.at("command").get<std::string>() == "run");
  REQUIRE(j.at("name").get<std::string>() == "bell");
  REQUIRE(j.at("kind").get<std::string>() == "scenario");
  REQUIRE(j.at("seed").get<std::uint64_t>() == 9);
  REQUIRE(std::abs(j.at("report").at("w_a").get<double>() - 0.5) < 1e-12);
  REQUIRE(std::abs(j.at("report").at("chi_trace_norm").get<double>() - 1.5) < 1e-12);
  REQUIRE(j.at("all_expected_pass").get<bool>());
  REQUIRE_FALSE(j.at("expected_checks").empty());
  for (const nsit::Json& c : j.at("expected_checks")) REQUIRE(c.at("pass").get<bool>());
  REQUIRE(res.err.empty());
}

TEST_CASE("run reports state probes with their own quantity set") {
  const CliResult res = run_cli("run --scenario epsilon-mixture");
  REQUIRE(res.exit_code == 0);
  const nsit::Json j = nsit::Json::parse(res.out);
  REQUIRE(j.at("kind").get<std::string>() == "state_probe");
  REQUIRE(std::abs(j.at("report").at("w_a").get<double>() - 0.1) < 1e-12);
  REQUIRE(std::abs(j.at("report").at("ppt_min_eig").get<double>() - 0.1) < 1e-12);
}

TEST_CASE("run csv output follows the documented column registry") {
  const CliResult res = run_cli("run --scenario bell --format csv");
  REQUIRE(res.exit_code == 0);
  const auto rows = parse_csv(res.out);
  REQUIRE(rows.size() == 2);
  const std::vector<std::string> header = {
      "name", "p1", "p2", "p3", "p4", "w_a", "w_b", "w_c", "w_isolated", "r_monotone",
      "wa_coherence_term", "wa_correlation_term", "wb_chi_term", "wb_coherence_term",
      "wb_map_mismatch_term", "chi_trace_norm", "iq_distance", "wa_bound_slack",
      "wb_bound_slack"};
  REQUIRE(rows[0] == header);
  REQUIRE(rows[1][0] == "bell");
  REQUIRE(std::abs(std::stod(rows[1][5]) - 0.5) < 1e-12);   // w_a
  REQUIRE(std::abs(std::stod(rows[1][15]) - 1.5) < 1e-12);  // chi_trace_norm

  const CliResult probe = run_cli("run --scenario epsilon-mixture --format csv");
  REQUIRE(probe.exit_code == 0);
  const auto probe_rows = parse_csv(probe.out);
  REQUIRE(probe_rows[0] ==
          std::vector<std::string>{"name", "w_a", "iq_distance", "chi_trace_norm", "ppt_min_eig"});
}

TEST_CASE("run rejects bad invocations with exit code 1") {
  for (const std::string& args :
       {std::string("run"), std::string("run --scenario bell --config /tmp/x.json"),
        std::string("run --scenario no-such-scenario"),
        std::string("run --scenario bell --format xml"), std::string("frobnicate"),
        std::string(""), std::string("run --config /no/such/dir/config.json")}) {
    const CliResult res = run_cli(args);
    INFO("args: " << args);
    REQUIRE(res.exit_code == 1);
    REQUIRE(res.err.find("error:") != std::string::npos);
  }
}

TEST_CASE("run loads scenario config files") {
  const fs::path config = scratch_file("scenario");
  spill(config, nsit::named_scenario_to_json(nsit::isolated_max_coherent_scenario(3)).dump(2));
  const CliResult res = run_cli("run --config \"" + config.string() + "\"");
  INFO(res.err);
  REQUIRE(res.exit_code == 0);
  const nsit::Json j = nsit::Json::parse(res.out);
  REQUIRE(j.at("name").get<std::string>() == "isolated-max-coherent");
  REQUIRE(std::abs(j.at("report").at("w_a").get<double>() - 2.0 / 3.0) < 1e-12);
  REQUIRE(j.at("all_expected_pass").get<bool>());
}

TEST_CASE("run exits 2 when an expected value fails") {
  nsit::NamedScenario ns = nsit::bell_scenario();
  ns.expected = {{"w_a", 0.25, 1e-6, "deliberately wrong"}};
  const fs::path config = scratch_file("bad_expected");
  spill(config, nsit::named_scenario_to_json(ns).dump(2));
  const CliResult res = run_cli("run --config \"" + config.string() + "\"");
  REQUIRE(res.exit_code == 2);
  REQUIRE(res.err.find("expected-failure:") != std::string::npos);
  REQUIRE(res.err.find("w_a") != std::string::npos);
  const nsit::Json j = nsit::Json::parse(res.out);  // the report is still emitted
  REQUIRE_FALSE(j.at("all_expected_pass").get<bool>());
}

TEST_CASE("sweep walks the mixture weight and reports closed-form witnesses") {
  nsit::Json config;
  config["schema_version"] = nsit::kSchemaVersion;
  config["sweep"] = {{"scenario", "epsilon-mixture"}, {"parameter", "eps"},
                     {"start", 0.0},                  {"stop", 0.4},
                     {"steps", 5},                    {"fixed", {{"d", 2}}}};
  const fs::path path = scratch_file("sweep_eps");
  spill(path, config.dump(2));

  const CliResult res = run_cli("sweep --config \"" + path.string() + "\"");
  INFO(res.err);
  REQUIRE(res.exit_code == 0);
  const auto rows = parse_csv(res.out);
  REQUIRE(rows.size() == 6);
  REQUIRE(rows[0] == std::vector<std::string>{"parameter", "w_a", "iq_distance",
                                              "chi_trace_norm", "ppt_min_eig"});
  for (size_t r = 1; r < rows.size(); ++r) {
    const double eps = std::stod(rows[r][0]);
    REQUIRE(std::abs(std::stod(rows[r][1]) - eps / 2.0) < 1e-9);  // w_a = eps (1 - 1/d)
  }
  REQUIRE(std::abs(std::stod(rows[5][0]) - 0.4) < 1e-15);
}

TEST_CASE("sweep over the dimension uses the scenario column registry") {
  nsit::Json config;
  config["schema_version"] = nsit::kSchemaVersion;
  config["sweep"] = {{"scenario", "isolated-max-coherent"},
                     {"parameter", "d"},
                     {"start", 2.0},
                     {"stop", 4.0},
                     {"steps", 3}};
  const fs::path path = scratch_file("sweep_d");
  spill(path, config.dump(2));

  const CliResult res = run_cli("sweep --config \"" + path.string() + "\" --format json");
  INFO(res.err);
  REQUIRE(res.exit_code == 0);
  const nsit::Json j = nsit::Json::parse(res.out);
  REQUIRE(j.at("command").get<std::string>() == "sweep");
  REQUIRE(j.at("sweep").at("scenario").get<std::string>() == "isolated-max-coherent");
  const auto columns = j.at("columns").get<std::vector<std::string>>();
  REQUIRE(columns.front() == "parameter");
  REQUIRE(columns[5] == "w_a");
  REQUIRE(j.at("rows").size() == 3);
  for (size_t k = 0; k < 3; ++k) {
    const double d = j.at("rows").at(k).at(0).get<double>();
    const double w_a = j.at("rows").at(k).at(5).get<double>();
    REQUIRE(std::abs(w_a - (1.0 - 1.0 / d)) < 1e-12);
  }
}

TEST_CASE("sweep rejects empty or malformed ranges") {
  nsit::Json config;
  config["schema_version"] = nsit::kSchemaVersion;
  config["sweep"] = {{"scenario", "epsilon-mixture"}, {"parameter", "eps"},
                     {"start", 0.0},                  {"stop", 0.4},
                     {"steps", 0}};
  const fs::path path = scratch_file("sweep_empty");
  spill(path, config.dump(2));
  REQUIRE(run_cli("sweep --config \"" + path.string() + "\"").exit_code == 1);

  config["sweep"]["steps"] = 3;
  config["sweep"]["parameter"] = "temperature";
  spill(path, config.dump(2));
  const CliResult unsupported = run_cli("sweep --config \"" + path.string() + "\"");
  REQUIRE(unsupported.exit_code == 1);
  REQUIRE(unsupported.err.find("unsupported sweep") != std::string::npos);

  config["sweep"]["parameter"] = "d";
  config["sweep"]["start"] = 2.5;  // non-integer dimension
  spill(path, config.dump(2));
  REQUIRE(run_cli("sweep --config \"" + path.string() + "\"").exit_code == 1);

  REQUIRE(run_cli("sweep").exit_code == 1);  // --config is required
  REQUIRE(run_cli("sweep --config /no/such/file.json").exit_code == 1);
}

TEST_CASE("verify runs a single named check and honours the seed in its summary") {
  const CliResult res = run_cli("verify --only gamma-equivalence --seed 5");
  INFO(res.out);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.out.find("PASS gamma-equivalence") != std::string::npos);
  REQUIRE(res.out.find("verify: 1/1 checks passed (seed 5)") != std::string::npos);

  REQUIRE(run_cli("verify --only no-such-check").exit_code == 1);
}

TEST_CASE("verify writes structured reports next to the text summary") {
  const fs::path json_path = scratch_file("verify_json");
  const CliResult res =
      run_cli("verify --only partial-summation --seed 11 --output \"" + json_path.string() + "\"");
  REQUIRE(res.exit_code == 0);
  const nsit::Json j = nsit::Json::parse(slurp(json_path));
  REQUIRE(j.at("command").get<std::string>() == "verify");
  REQUIRE(j.at("seed").get<std::uint64_t>() == 11);
  REQUIRE(j.at("only").get<std::string>() == "partial-summation");
  REQUIRE(j.at("checks").size() == 1);
  REQUIRE(j.at("checks").at(0).at("name").get<std::string>() == "partial-summation");
  REQUIRE(j.at("checks").at(0).at("pass").get<bool>());
  REQUIRE_FALSE(j.at("checks").at(0).at("details").empty());
  REQUIRE(j.at("all_pass").get<bool>());

  const fs::path csv_path = scratch_file("verify_csv");
  const CliResult csv = run_cli("verify --only gamma-equivalence --format csv --output \"" +
                                csv_path.string() + "\"");
  REQUIRE(csv.exit_code == 0);
  const auto rows = parse_csv(slurp(csv_path));
  REQUIRE(rows[0] == std::vector<std::string>{"check", "label", "measured", "expected",
                                              "tolerance", "relation", "pass"});
  REQUIRE(rows.size() > 1);
  for (size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r][0] == "gamma-equivalence");
    REQUIRE(rows[r][6] == "true");
  }
}

TEST_CASE("verify tolerance overrides are validated and applied") {
  REQUIRE(run_cli("verify --only gamma-equivalence --tolerance nonsense").exit_code == 1);
  REQUIRE(run_cli("verify --only gamma-equivalence --tolerance =1e-3").exit_code == 1);
  REQUIRE(run_cli("verify --only gamma-equivalence --tolerance x=1e-3junk").exit_code == 1);

  // an impossible tolerance flips the check to FAIL and the exit code to 2
  const CliResult res =
      run_cli("verify --only gamma-equivalence --tolerance gamma-equivalence=-1");
  REQUIRE(res.exit_code == 2);
  REQUIRE(res.out.find("FAIL gamma-equivalence") != std::string::npos);
  REQUIRE(res.out.find("verify: 0/1 checks passed") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical output") {
  const CliResult run1 = run_cli("run --scenario bell --seed 7");
  const CliResult run2 = run_cli("run --scenario bell --seed 7");
  REQUIRE(run1.exit_code == 0);
  REQUIRE(run1.out == run2.out);

  const fs::path out1 = scratch_file("det1");
  const fs::path out2 = scratch_file("det2");
  const std::string verify_args = "verify --only partial-summation --seed 7 --output ";
  const CliResult v1 = run_cli(verify_args + "\"" + out1.string() + "\"");
  const CliResult v2 = run_cli(verify_args + "\"" + out2.string() + "\"");
  REQUIRE(v1.exit_code == 0);
  REQUIRE(v2.exit_code == 0);
  REQUIRE(v1.out == v2.out);
  REQUIRE(slurp(out1) == slurp(out2));
  REQUIRE_FALSE(slurp(out1).empty());
}

TEST_CASE("output files carry exactly the bytes that stdout would") {
  const CliResult direct = run_cli("run --scenario bell --format csv");
  const fs::path out = scratch_file("bell_csv");
  const CliResult filed = run_cli("run --scenario bell --format csv --output \"" + out.string() +
                                  "\"");
  REQUIRE(direct.exit_code == 0);
  REQUIRE(filed.exit_code == 0);
  REQUIRE(filed.out.empty());
  REQUIRE(slurp(out) == direct.out);
}
