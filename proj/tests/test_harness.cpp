#include "nli/closed_form.hpp"
#include "nli/harness.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace nli;
using namespace nli::harness;

namespace {

const std::filesystem::path kConfigs = NLI_CONFIG_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string base_config(const std::string& signal, const std::string& methods,
                        const std::string& extra = "") {
  return R"({"schema": 1, "name": "t",
    "link": {"span": {"length_km": 100, "loss_db_per_km": 0.2, "beta2_ps2_per_km": 21,
                      "gamma_per_w_km": 1.3}, "n_spans": 4},
    "signal": )" + signal + R"(, "methods": )" + methods + extra + "}";
}

const std::string kSignal = R"({"bandwidth": 0.032, "g0_w_per_thz": 1.0})";

std::string csv_of(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  write_csv(rows, os);
  return os.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nli_harness_test_" + name);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("SMF config echo shows the dispersion argument") {
  const ScenarioConfig c = load_config(kConfigs / "smf_10x100.json");
  CHECK(c.link.n_spans() == 10);
  CHECK(c.signal().bandwidth_thz() == doctest::Approx(0.032).epsilon(1e-15));
  CHECK(c.signal().g0_w_per_thz() == doctest::Approx(1e-3 / 0.032).epsilon(1e-14));
  CHECK(c.reference == Method::ExactSeries);
  CHECK(describe(c).find("21.22") != std::string::npos);
}

TEST_CASE("validation errors name the offending field") {
  SUBCASE("missing bandwidth") {
    try {
      parse_config(base_config(R"({"g0_w_per_thz": 1.0})", R"(["sinint"])"));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "signal.bandwidth");
    }
  }
  SUBCASE("unknown key") {
    try {
      parse_config(base_config(kSignal, R"(["sinint"])", R"(, "colour": 3)"));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("colour") != std::string::npos);
    }
  }
  SUBCASE("negative span length") {
    const std::string bad = R"({"schema": 1, "link": {"span": {"length_km": -1, "loss_db_per_km": 0.2,
      "beta2_ps2_per_km": 21, "gamma_per_w_km": 1.3}, "n_spans": 2}, "signal": )" + kSignal +
                            R"(, "methods": ["sinint"]})";
    try {
      parse_config(bad);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field().find("length_km") != std::string::npos);
    }
  }
  SUBCASE("schema, malformed JSON, method rules") {
    CHECK_THROWS_AS(parse_config("{"), ValidationError);
    CHECK_THROWS_AS(parse_config(base_config(kSignal, R"(["nope"])")), ValidationError);
    CHECK_THROWS_AS(parse_config(base_config(kSignal, R"(["sinint", "sinint"])")), ValidationError);
    CHECK_THROWS_AS(parse_config(base_config(kSignal, R"(["sinint"])", R"(, "reference_method": "siapp")")),
                    ValidationError);
  }
  SUBCASE("unreadable file") {
    CHECK_THROWS_AS(load_config(kConfigs / "does_not_exist.json"), IoError);
  }
}

TEST_CASE("heterogeneous config") {
  const ScenarioConfig c = load_config(kConfigs / "hetero_3span.json");
  CHECK(c.link.n_spans() == 3);
  CHECK_FALSE(c.link.is_homogeneous());
  const auto rows = run(c, RunMode::Single);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].estimate.g_cc_w_per_thz > 0.0);
  CHECK_FALSE(rows[0].estimate.has_warning(Warning::RolloffHigh));
}

TEST_CASE("single span: coherence correction vanishes") {
  std::string text = base_config(kSignal, R"(["sinint", "exact-series"])");
  text.replace(text.find("\"n_spans\": 4"), 12, "\"n_spans\": 1");
  const auto rows = run(parse_config(text), RunMode::Compare);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(r.estimate.g_cc_w_per_thz == 0.0);
}

TEST_CASE("oracle row agrees with the exact series") {
  const auto rows = run(parse_config(base_config(kSignal, R"(["exact-series", "oracle-square"])",
                                                 R"(, "quadrature": {"rel_tol": 1e-9})")),
                        RunMode::Compare);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].delta_db_vs_ref == 0.0);
  CHECK(std::abs(*rows[1].delta_db_vs_ref) <= 1e-6);
  CHECK(rows[1].quad_error.has_value());
}

TEST_CASE("sweep rows are ordered point-major") {
  const ScenarioConfig c = load_config(kConfigs / "nzdsf_nspans_sweep.json");
  const auto rows = run_compare(c);
  REQUIRE(rows.size() == c.sweep->values.size() * c.methods.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t point = i / c.methods.size();
    CHECK(rows[i].sweep_param == "n_spans");
    CHECK(*rows[i].sweep_value == c.sweep->values[point]);
    CHECK(rows[i].method == c.methods[i % c.methods.size()].method);
  }
}

TEST_CASE("CSV layout") {
  const auto rows = run(parse_config(base_config(kSignal, R"(["sinint", "siapp"])")), RunMode::Compare);
  const std::string csv = csv_of(rows);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\r\n", 0) == 0);
  std::size_t lines = 0;
  for (std::size_t p = csv.find("\r\n"); p != std::string::npos; p = csv.find("\r\n", p + 2)) ++lines;
  CHECK(lines == 3);
  CHECK(csv.find("t,sinint,,,") != std::string::npos);
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("output is deterministic across reruns and thread counts") {
  const ScenarioConfig c = load_config(kConfigs / "nzdsf_nspans_sweep.json");
  const std::string one = csv_of(run_compare(c, 1));
  CHECK(one == csv_of(run_compare(c, 1)));
  CHECK(one == csv_of(run_compare(c, 4)));
}

TEST_CASE("bandwidth units are interchangeable") {
  const auto a = run(parse_config(base_config(R"({"bandwidth": 0.032, "g0_w_per_thz": 1})", R"(["sinint"])")),
                     RunMode::Single);
  const auto b = run(parse_config(base_config(
                         R"({"bandwidth_wdm": {"value": 32, "unit": "GBaud"}, "g0_w_per_thz": 1})",
                         R"(["sinint"])")),
                     RunMode::Single);
  CHECK(csv_of(a) == csv_of(b));
}

TEST_CASE("CLI exit codes") {
  const auto out = temp_path("out.csv");
  CHECK(run_cli("compare --config " + (kConfigs / "hetero_3span.json").string() + " --out " + out.string()) == 0);
  CHECK(std::filesystem::file_size(out) > 0);

  const auto bad = temp_path("bad.json");
  std::ofstream(bad) << base_config(R"({"g0_w_per_thz": 1.0})", R"(["sinint"])");
  CHECK(run_cli("evaluate --config " + bad.string()) == 1);
  CHECK(run_cli("frobnicate --config " + bad.string()) == 1);

  const auto starved = temp_path("starved.json");
  std::ofstream(starved) << base_config(kSignal, R"([{"method": "oracle-square", "required": true}])",
                                        R"(, "quadrature": {"rel_tol": 1e-12, "max_evals": 2000})");
  CHECK(run_cli("evaluate --config " + starved.string()) == 2);

  CHECK(run_cli("evaluate --config " + temp_path("missing.json").string()) == 3);
  CHECK(run_cli("compare --config " + (kConfigs / "hetero_3span.json").string() +
                " --out /nonexistent_dir/x.csv") == 3);
  CHECK(run_cli("selftest") == 0);
  std::filesystem::remove(out);
  std::filesystem::remove(bad);
  std::filesystem::remove(starved);
}
