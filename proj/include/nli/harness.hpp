#pragma once

#include "nli/closed_form.hpp"
#include "nli/link_model.hpp"
#include "nli/quadrature.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Scenario files, method dispatch, sweeps and CSV output for the CLI.

namespace nli::harness {

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { NSpans, Bandwidth, Beta2, SpanLoss };

std::string_view to_string(SweepAxis axis) noexcept;

struct Sweep {
  SweepAxis axis = SweepAxis::NSpans;
  std::vector<double> values;  // canonical units: count, THz, ps^2/km, dB
};

struct MethodRequest {
  Method method = Method::SinInt;
  bool required = false;
  closed_form::SiMode si_mode = closed_form::SiMode::SiApp;  // heterogeneous only
};

/// How the signal level was given; a fixed launch power keeps P constant when
/// the bandwidth is swept, a fixed PSD keeps G0 constant.
struct PowerSpec {
  enum class Kind { Psd, PowerW } kind = Kind::Psd;
  double value = 0.0;  // W/THz or W
};

struct ScenarioConfig {
  std::string name;
  LinkConfig link = LinkConfig::homogeneous(FiberSpan({1.0, 1.0, 1.0, 0.0}), 1);
  double bandwidth_thz = 0.0;
  PowerSpec power;
  std::optional<double> rolloff;
  std::vector<MethodRequest> methods;
  Method reference = Method::SinInt;
  QuadratureSettings quadrature;
  std::optional<Sweep> sweep;

  SignalSpec signal() const;
  SignalSpec signal_at(double bandwidth_thz) const;
};

/// Parses and validates a scenario. Unknown keys are rejected. `source`
/// appears in parse error messages.
ScenarioConfig parse_config(const std::string& json_text, const std::string& source = "<config>");

/// Reads a scenario file; IoError if unreadable, ValidationError otherwise.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Human-readable summary of the resolved scenario in canonical units,
/// including the dispersion argument pi^2 b2 Ls B^2 of every distinct span.
std::string describe(const ScenarioConfig& config);

struct ComparisonRow {
  std::string scenario;
  Method method = Method::SinInt;
  std::string sweep_param;            // empty without a sweep
  std::optional<double> sweep_value;
  NliEstimate estimate;
  std::optional<double> delta_db_vs_ref;
  std::optional<double> quad_error;   // set for numerically integrated methods
  bool budget_failed = false;
  bool required = false;
};

/// Runs one method on one link. Budget exhaustion is reported through the
/// QUAD_BUDGET_EXHAUSTED warning with the best partial estimate.
ComparisonRow evaluate_method(const MethodRequest& request, const LinkConfig& link,
                              const SignalSpec& signal, const QuadratureSettings& settings);

enum class RunMode {
  Single,   // reference method at the base point
  Compare,  // every method at the base point
  Sweep,    // every method at every sweep point
};

/// Rows ordered sweep-point major, then in the configured method order.
/// Output is independent of `threads`.
std::vector<ComparisonRow> run(const ScenarioConfig& config, RunMode mode, int threads = 1);

inline std::vector<ComparisonRow> run_compare(const ScenarioConfig& config, int threads = 1) {
  return run(config, config.sweep ? RunMode::Sweep : RunMode::Compare, threads);
}

inline constexpr const char* kCsvHeader =
    "scenario,method,sweep_param,sweep_value,g_inc_w_per_thz,g_cc_w_per_thz,total_w_per_thz,"
    "delta_db_vs_ref,quad_err,warnings";

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

void write_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);

/// Writes the CSV file; IoError on failure.
void emit_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);

/// Invariant checks on built-in scenarios, one PASS/FAIL line each.
/// Returns true when every check passes.
bool run_selftest(std::ostream& out);

}  // namespace nli::harness
