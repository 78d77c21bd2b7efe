#include "nli/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kBudget = 2, kIo = 3 };

int run_verb(const std::string& verb, const std::string& config_path, const std::string& out_path,
             const std::string& ref_method, int threads) {
  using namespace nli;
  if (verb == "selftest") {
    return harness::run_selftest(std::cout) ? kOk : kValidation;
  }
  if (config_path.empty()) throw ValidationError("--config", "required for '" + verb + "'");
  harness::ScenarioConfig config = harness::load_config(config_path);
  if (!ref_method.empty()) {
    const Method ref = method_from_string(ref_method);
    bool listed = false;
    for (const auto& m : config.methods) listed = listed || m.method == ref;
    if (!listed) throw ValidationError("--ref-method", "'" + ref_method + "' is not in methods");
    config.reference = ref;
  }
  std::cerr << harness::describe(config);

  harness::RunMode mode = harness::RunMode::Compare;
  if (verb == "evaluate") {
    mode = harness::RunMode::Single;
  } else if (verb == "sweep") {
    if (!config.sweep) throw ValidationError("sweep", "config has no sweep section");
    mode = harness::RunMode::Sweep;
  }
  const auto rows = harness::run(config, mode, threads);
  if (out_path.empty()) {
    harness::write_csv(rows, std::cout);
  } else {
    harness::emit_csv(rows, out_path);
  }
  for (const auto& row : rows) {
    if (row.required && row.budget_failed) {
      std::cerr << "error: required method " << to_string(row.method)
                << " exhausted its quadrature budget\n";
      return kBudget;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NLI power spectral density of a rectangular spectrum over a multi-span link"};
  std::string verb;
  std::string config_path;
  std::string out_path;
  std::string ref_method;
  int threads = 1;
  app.add_option("verb", verb, "evaluate | compare | sweep | selftest")
      ->required()
      ->check(CLI::IsMember({"evaluate", "compare", "sweep", "selftest"}));
  app.add_option("--config", config_path, "scenario file (JSON)");
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--ref-method", ref_method, "reference method for delta_db_vs_ref");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    return run_verb(verb, config_path, out_path, ref_method, threads);
  } catch (const nli::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const nli::harness::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const nli::QuadratureBudgetError& e) {
    std::cerr << "quadrature error: " << e.what() << "\n";
    return kBudget;
  }
}
