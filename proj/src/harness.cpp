#include "nli/harness.hpp"

#include "nli/gnrf_oracle.hpp"
#include "nli/specfun.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace nli::harness {

namespace {

using json = nlohmann::json;

constexpr double kDbPerNeper = 4.342944819032518;  // 10 log10(e)

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError(field, what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
}

void check_keys(const json& j, const std::string& prefix, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return key == k; });
    if (!known) fail(join(prefix, key), "unknown key");
  }
}

double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

// Exactly one of `keys` must be present; returns its name or fails.
std::string one_of(const json& j, const std::string& prefix, std::initializer_list<const char*> keys,
                   const std::string& missing_field) {
  std::string found;
  for (const char* k : keys) {
    if (!j.contains(k)) continue;
    if (!found.empty()) fail(join(prefix, k), "conflicts with " + join(prefix, found));
    found = k;
  }
  if (found.empty()) {
    std::string names;
    for (const char* k : keys) names += (names.empty() ? "" : " | ") + std::string(k);
    fail(missing_field, "missing (expected one of " + names + ")");
  }
  return found;
}

double bandwidth_in_thz(double value, const std::string& unit, const std::string& field) {
  if (unit == "THz") return value;
  if (unit == "GHz" || unit == "GBaud") return value / 1000.0;
  fail(field, "unknown unit '" + unit + "' (THz, GHz or GBaud)");
}

double parse_bandwidth(const json& j, const std::string& field) {
  if (j.is_number()) return number_at(j, field);
  require_object(j, field);
  check_keys(j, field, {"value", "unit"});
  if (!j.contains("value")) fail(field + ".value", "missing");
  const double v = number_at(j["value"], field + ".value");
  std::string unit = "THz";
  if (j.contains("unit")) {
    if (!j["unit"].is_string()) fail(field + ".unit", "expected a string");
    unit = j["unit"].get<std::string>();
  }
  return bandwidth_in_thz(v, unit, field + ".unit");
}

FiberSpan parse_span(const json& j, const std::string& prefix) {
  require_object(j, prefix);
  check_keys(j, prefix,
             {"length_km", "loss_db_per_km", "loss_coeff_per_km", "beta2_ps2_per_km",
              "gamma_per_w_km"});
  FiberSpan::Params p;
  for (const char* k : {"length_km", "beta2_ps2_per_km", "gamma_per_w_km"}) {
    if (!j.contains(k)) fail(join(prefix, k), "missing");
  }
  p.length_km = number_at(j["length_km"], join(prefix, "length_km"));
  p.beta2_ps2_per_km = number_at(j["beta2_ps2_per_km"], join(prefix, "beta2_ps2_per_km"));
  p.gamma_per_w_km = number_at(j["gamma_per_w_km"], join(prefix, "gamma_per_w_km"));
  const std::string loss_key = one_of(j, prefix, {"loss_db_per_km", "loss_coeff_per_km"},
                                      join(prefix, "loss_db_per_km"));
  const double loss = number_at(j[loss_key], join(prefix, loss_key));
  p.loss_coeff_per_km = loss_key == "loss_db_per_km" ? loss_coeff_from_db_per_km(loss) : loss;
  try {
    return FiberSpan(p);
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    throw ValidationError(join(prefix, e.field()), what.substr(e.field().size() + 2));
  }
}

LinkConfig parse_link(const json& j) {
  require_object(j, "link");
  check_keys(j, "link", {"span", "n_spans", "spans"});
  if (j.contains("spans")) {
    if (j.contains("span") || j.contains("n_spans")) {
      fail("link.spans", "cannot be combined with link.span / link.n_spans");
    }
    const json& arr = j["spans"];
    if (!arr.is_array() || arr.empty()) fail("link.spans", "expected a non-empty array");
    std::vector<FiberSpan> spans;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      spans.push_back(parse_span(arr[i], "link.spans[" + std::to_string(i) + "]"));
    }
    return LinkConfig::heterogeneous(std::move(spans));
  }
  if (!j.contains("span")) fail("link.span", "missing (or give link.spans)");
  if (!j.contains("n_spans")) fail("link.n_spans", "missing");
  const FiberSpan span = parse_span(j["span"], "link.span");
  const json& n = j["n_spans"];
  if (!n.is_number_integer() || n.get<long long>() < 1 || n.get<long long>() > 1'000'000) {
    fail("link.n_spans", "expected an integer in [1, 1000000]");
  }
  return LinkConfig::homogeneous(span, static_cast<int>(n.get<long long>()));
}

PowerSpec parse_power(const json& signal) {
  const std::string key = one_of(signal, "signal", {"g0_w_per_thz", "power_dbm", "power_w"},
                                 "signal.g0_w_per_thz");
  const double v = number_at(signal[key], "signal." + key);
  PowerSpec p;
  if (key == "g0_w_per_thz") {
    p = {PowerSpec::Kind::Psd, v};
  } else if (key == "power_w") {
    p = {PowerSpec::Kind::PowerW, v};
  } else {
    p = {PowerSpec::Kind::PowerW, 1e-3 * std::pow(10.0, v / 10.0)};
  }
  if (!(p.value > 0.0)) fail("signal." + key, "must be > 0");
  return p;
}

MethodRequest parse_method(const json& j, const std::string& field) {
  MethodRequest r;
  if (j.is_string()) {
    r.method = method_from_string(j.get<std::string>());
    return r;
  }
  require_object(j, field);
  check_keys(j, field, {"method", "required", "si"});
  if (!j.contains("method") || !j["method"].is_string()) fail(field + ".method", "expected a tag");
  try {
    r.method = method_from_string(j["method"].get<std::string>());
  } catch (const ValidationError&) {
    fail(field + ".method", "unknown method tag '" + j["method"].get<std::string>() + "'");
  }
  if (j.contains("required")) {
    if (!j["required"].is_boolean()) fail(field + ".required", "expected true or false");
    r.required = j["required"].get<bool>();
  }
  if (j.contains("si")) {
    if (r.method != Method::Heterogeneous) fail(field + ".si", "only valid for heterogeneous");
    const std::string si = j["si"].is_string() ? j["si"].get<std::string>() : "";
    if (si == "siapp") {
      r.si_mode = closed_form::SiMode::SiApp;
    } else if (si == "sinint") {
      r.si_mode = closed_form::SiMode::SinInt;
    } else {
      fail(field + ".si", "expected \"siapp\" or \"sinint\"");
    }
  }
  return r;
}

QuadratureSettings parse_quadrature(const json& j) {
  require_object(j, "quadrature");
  check_keys(j, "quadrature", {"rel_tol", "abs_tol", "max_evals", "max_depth"});
  QuadratureSettings s;
  if (j.contains("rel_tol")) s.rel_tol = number_at(j["rel_tol"], "quadrature.rel_tol");
  if (j.contains("abs_tol")) s.abs_tol = number_at(j["abs_tol"], "quadrature.abs_tol");
  if (j.contains("max_evals")) {
    if (!j["max_evals"].is_number_integer() || j["max_evals"].get<long long>() < 0) {
      fail("quadrature.max_evals", "expected a non-negative integer");
    }
    s.max_evals = j["max_evals"].get<std::size_t>();
  }
  if (j.contains("max_depth")) {
    if (!j["max_depth"].is_number_integer()) fail("quadrature.max_depth", "expected an integer");
    s.max_depth = j["max_depth"].get<int>();
  }
  s.validate();
  return s;
}

SweepAxis parse_axis(const json& j) {
  const std::string a = j.is_string() ? j.get<std::string>() : "";
  if (a == "n_spans") return SweepAxis::NSpans;
  if (a == "bandwidth") return SweepAxis::Bandwidth;
  if (a == "beta2") return SweepAxis::Beta2;
  if (a == "span_loss") return SweepAxis::SpanLoss;
  fail("sweep.axis", "expected n_spans | bandwidth | beta2 | span_loss");
}

Sweep parse_sweep(const json& j) {
  require_object(j, "sweep");
  check_keys(j, "sweep", {"axis", "values", "start", "stop", "count", "unit"});
  if (!j.contains("axis")) fail("sweep.axis", "missing");
  Sweep s;
  s.axis = parse_axis(j["axis"]);

  std::vector<double> raw;
  if (j.contains("values")) {
    for (const char* k : {"start", "stop", "count"}) {
      if (j.contains(k)) fail(std::string("sweep.") + k, "cannot be combined with sweep.values");
    }
    if (!j["values"].is_array() || j["values"].empty()) {
      fail("sweep.values", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < j["values"].size(); ++i) {
      raw.push_back(number_at(j["values"][i], "sweep.values[" + std::to_string(i) + "]"));
    }
  } else {
    for (const char* k : {"start", "stop", "count"}) {
      if (!j.contains(k)) fail(std::string("sweep.") + k, "missing (or give sweep.values)");
    }
    const double start = number_at(j["start"], "sweep.start");
    const double stop = number_at(j["stop"], "sweep.stop");
    if (!j["count"].is_number_integer() || j["count"].get<long long>() < 1 ||
        j["count"].get<long long>() > 100000) {
      fail("sweep.count", "expected an integer in [1, 100000]");
    }
    const auto count = j["count"].get<long long>();
    for (long long i = 0; i < count; ++i) {
      raw.push_back(count == 1 ? start
                               : start + (stop - start) * static_cast<double>(i) /
                                             static_cast<double>(count - 1));
    }
  }

  std::string unit;
  if (j.contains("unit")) {
    if (!j["unit"].is_string()) fail("sweep.unit", "expected a string");
    unit = j["unit"].get<std::string>();
  }
  for (double v : raw) {
    switch (s.axis) {
      case SweepAxis::NSpans:
        if (!unit.empty()) fail("sweep.unit", "n_spans takes no unit");
        if (v != std::floor(v) || v < 1.0 || v > 1'000'000.0) {
          fail("sweep.values", "n_spans values must be integers in [1, 1000000]");
        }
        s.values.push_back(v);
        break;
      case SweepAxis::Bandwidth:
        s.values.push_back(bandwidth_in_thz(v, unit.empty() ? "THz" : unit, "sweep.unit"));
        if (!(s.values.back() > 0.0)) fail("sweep.values", "bandwidth must be > 0");
        break;
      case SweepAxis::Beta2:
        if (!unit.empty() && unit != "ps2/km") fail("sweep.unit", "beta2 unit is ps2/km");
        if (!(v > 0.0)) fail("sweep.values", "beta2 must be > 0");
        s.values.push_back(v);
        break;
      case SweepAxis::SpanLoss:
        if (!unit.empty() && unit != "dB") fail("sweep.unit", "span_loss unit is dB");
        if (!(v > 0.0)) fail("sweep.values", "span loss must be > 0 dB");
        s.values.push_back(v);
        break;
    }
  }
  return s;
}

bool is_oracle(Method m) {
  return m == Method::OracleLozengeExact || m == Method::OracleSquare;
}

struct Point {
  LinkConfig link;
  SignalSpec signal;
  std::optional<double> sweep_value;
};

LinkConfig map_spans(const LinkConfig& link, const std::function<FiberSpan(const FiberSpan&)>& f) {
  std::vector<FiberSpan> spans;
  for (const FiberSpan& s : link.spans()) spans.push_back(f(s));
  if (link.is_homogeneous()) return LinkConfig::homogeneous(spans.front(), link.n_spans());
  return LinkConfig::heterogeneous(std::move(spans));
}

Point point_at(const ScenarioConfig& c, const Sweep& sweep, double v) {
  switch (sweep.axis) {
    case SweepAxis::NSpans:
      return {LinkConfig::homogeneous(c.link.spans().front(), static_cast<int>(v)), c.signal(), v};
    case SweepAxis::Bandwidth:
      return {c.link, c.signal_at(v), v};
    case SweepAxis::Beta2:
      return {map_spans(c.link,
                        [&](const FiberSpan& s) {
                          FiberSpan::Params p = s.params();
                          p.beta2_ps2_per_km = v;
                          return FiberSpan(p);
                        }),
              c.signal(), v};
    case SweepAxis::SpanLoss:
      return {map_spans(c.link,
                        [&](const FiberSpan& s) {
                          FiberSpan::Params p = s.params();
                          p.loss_coeff_per_km = v / (kDbPerNeper * p.length_km);
                          return FiberSpan(p);
                        }),
              c.signal(), v};
  }
  return {c.link, c.signal(), v};
}

std::vector<Point> points_for(const ScenarioConfig& c, RunMode mode) {
  if (mode != RunMode::Sweep || !c.sweep) return {Point{c.link, c.signal(), std::nullopt}};
  std::vector<Point> pts;
  for (double v : c.sweep->values) pts.push_back(point_at(c, *c.sweep, v));
  return pts;
}

void validate_methods(const ScenarioConfig& c) {
  std::vector<int> counts;
  counts.push_back(c.link.n_spans());
  if (c.sweep && c.sweep->axis == SweepAxis::NSpans) {
    if (!c.link.is_homogeneous()) fail("sweep.axis", "n_spans sweep needs a homogeneous link");
    for (double v : c.sweep->values) counts.push_back(static_cast<int>(v));
  }
  std::set<Method> seen;
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    const Method m = c.methods[i].method;
    const std::string field = "methods[" + std::to_string(i) + "]";
    if (!seen.insert(m).second) fail(field, "duplicate method '" + std::string(to_string(m)) + "'");
    if (!c.link.is_homogeneous() && m != Method::Heterogeneous) {
      fail(field, "'" + std::string(to_string(m)) + "' needs a homogeneous link");
    }
    if (is_oracle(m)) {
      for (int n : counts) {
        if (n > oracle::kMaxOracleSpans) {
          fail(field, "2-D oracle supports at most " + std::to_string(oracle::kMaxOracleSpans) +
                          " spans (got " + std::to_string(n) + ")");
        }
      }
    }
  }
  if (!seen.count(c.reference)) {
    fail("reference_method", "'" + std::string(to_string(c.reference)) + "' is not in methods");
  }
}

void add_link_warnings(NliEstimate& est, const LinkConfig& link) {
  for (const FiberSpan& s : link.spans()) {
    if (span_loss_db(s) < kLowSpanLossThresholdDb) add_warning(est.warnings, Warning::LowSpanLoss);
  }
}

ComparisonRow oracle_row(Method method, const FiberSpan& span, int n_spans,
                         const SignalSpec& signal, const QuadratureSettings& settings) {
  const auto shape = method == Method::OracleSquare ? oracle::DomainShape::Square
                                                    : oracle::DomainShape::Lozenge;
  const auto model = method == Method::OracleSquare ? oracle::EfficiencyModel::Lorentzian
                                                    : oracle::EfficiencyModel::Exact;
  ComparisonRow row;
  auto run_one = [&](int n) {
    try {
      return oracle::g_nli_2d(signal, span, n, shape, model, settings);
    } catch (const QuadratureBudgetError& e) {
      row.budget_failed = true;
      return e.best();
    }
  };
  // Incoherent share: N independent single-span contributions.
  const QuadratureResult total = run_one(n_spans);
  const QuadratureResult single = n_spans == 1 ? total : run_one(1);
  row.estimate.g_inc_w_per_thz = n_spans * single.value;
  row.estimate.g_cc_w_per_thz = n_spans == 1 ? 0.0 : total.value - n_spans * single.value;
  row.quad_error = n_spans == 1 ? total.error : total.error + n_spans * single.error;
  return row;
}

}  // namespace

std::string_view to_string(SweepAxis axis) noexcept {
  switch (axis) {
    case SweepAxis::NSpans: return "n_spans";
    case SweepAxis::Bandwidth: return "bandwidth";
    case SweepAxis::Beta2: return "beta2";
    case SweepAxis::SpanLoss: return "span_loss";
  }
  return "";
}

SignalSpec ScenarioConfig::signal() const { return signal_at(bandwidth_thz); }

SignalSpec ScenarioConfig::signal_at(double bw) const {
  const double g0 = power.kind == PowerSpec::Kind::Psd ? power.value : power.value / bw;
  return SignalSpec(g0, bw);
}

ScenarioConfig parse_config(const std::string& json_text, const std::string& source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source, std::string("parse error: ") + e.what());
  }
  require_object(root, "<root>");
  check_keys(root, "",
             {"schema", "name", "link", "signal", "methods", "reference_method", "quadrature",
              "sweep"});
  if (!root.contains("schema")) fail("schema", "missing (expected 1)");
  if (!root["schema"].is_number_integer() || root["schema"].get<long long>() != 1) {
    fail("schema", "unsupported version (expected 1)");
  }

  ScenarioConfig c;
  if (root.contains("name")) {
    if (!root["name"].is_string()) fail("name", "expected a string");
    c.name = root["name"].get<std::string>();
  }
  if (!root.contains("link")) fail("link", "missing");
  c.link = parse_link(root["link"]);

  if (!root.contains("signal")) fail("signal", "missing");
  const json& sig = root["signal"];
  require_object(sig, "signal");
  check_keys(sig, "signal",
             {"bandwidth", "bandwidth_wdm", "bandwidth_cut", "g0_w_per_thz", "power_dbm",
              "power_w", "rolloff"});
  const std::string bw_key =
      one_of(sig, "signal", {"bandwidth", "bandwidth_wdm", "bandwidth_cut"}, "signal.bandwidth");
  c.bandwidth_thz = parse_bandwidth(sig[bw_key], "signal." + bw_key);
  if (!(c.bandwidth_thz > 0.0)) fail("signal." + bw_key, "must be > 0");
  c.power = parse_power(sig);
  if (sig.contains("rolloff")) {
    const double r = number_at(sig["rolloff"], "signal.rolloff");
    if (r < 0.0 || r > 1.0) fail("signal.rolloff", "must be in [0, 1]");
    c.rolloff = r;
  }

  if (!root.contains("methods")) fail("methods", "missing");
  if (!root["methods"].is_array() || root["methods"].empty()) {
    fail("methods", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < root["methods"].size(); ++i) {
    const std::string field = "methods[" + std::to_string(i) + "]";
    try {
      c.methods.push_back(parse_method(root["methods"][i], field));
    } catch (const ValidationError& e) {
      if (e.field() != "method") throw;
      fail(field, "unknown method tag '" + root["methods"][i].get<std::string>() + "'");
    }
  }
  c.reference = c.methods.front().method;
  if (root.contains("reference_method")) {
    if (!root["reference_method"].is_string()) fail("reference_method", "expected a tag");
    try {
      c.reference = method_from_string(root["reference_method"].get<std::string>());
    } catch (const ValidationError&) {
      fail("reference_method", "unknown method tag");
    }
  }
  if (root.contains("quadrature")) c.quadrature = parse_quadrature(root["quadrature"]);
  if (root.contains("sweep")) c.sweep = parse_sweep(root["sweep"]);
  validate_methods(c);
  (void)c.signal();  // G0 > 0 and B > 0 checked by SignalSpec
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config '" + path.string() + "'");
  ScenarioConfig c = parse_config(ss.str(), path.string());
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

std::string describe(const ScenarioConfig& c) {
  std::ostringstream os;
  os.precision(6);
  const SignalSpec sig = c.signal();
  os << "scenario " << (c.name.empty() ? "<unnamed>" : c.name) << "\n";
  os << "  spans: " << c.link.n_spans() << (c.link.is_homogeneous() ? " (homogeneous)" : "")
     << "\n";
  os << "  bandwidth: " << sig.bandwidth_thz() << " THz, G0: " << sig.g0_w_per_thz()
     << " W/THz\n";
  std::vector<FiberSpan> distinct;
  for (const FiberSpan& s : c.link.spans()) {
    if (std::find(distinct.begin(), distinct.end(), s) == distinct.end()) distinct.push_back(s);
  }
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    const FiberSpan& s = distinct[i];
    const DerivedSpan d = derive_effective_lengths(s);
    os << "  span " << i << ": Ls=" << s.length_km() << " km, loss=" << s.loss_coeff_per_km()
       << " 1/km (" << span_loss_db(s) << " dB), beta2=" << s.beta2_ps2_per_km()
       << " ps^2/km, gamma=" << s.gamma_per_w_km() << " 1/(W km), L_eff=" << d.l_eff_km
       << " km, L_inf=" << d.l_inf_km << " km\n";
    os << "    pi^2*beta2*Ls*B^2 = " << closed_form::dispersion_argument(s, sig) << "\n";
  }
  os << "  methods:";
  for (const MethodRequest& m : c.methods) {
    os << " " << to_string(m.method) << (m.required ? "(required)" : "");
  }
  os << "\n  reference: " << to_string(c.reference) << "\n";
  if (c.sweep) {
    os << "  sweep: " << to_string(c.sweep->axis) << " x " << c.sweep->values.size()
       << " points\n";
  }
  return os.str();
}

ComparisonRow evaluate_method(const MethodRequest& request, const LinkConfig& link,
                              const SignalSpec& signal, const QuadratureSettings& settings) {
  ComparisonRow row;
  const FiberSpan& span = link.spans().front();
  const int n = link.n_spans();
  switch (request.method) {
    case Method::OracleLozengeExact:
    case Method::OracleSquare:
      row = oracle_row(request.method, span, n, signal, settings);
      break;
    case Method::ExactSeries: {
      row.estimate.g_inc_w_per_thz = closed_form::g_inc_closed(signal, span, n);
      QuadratureResult cc;
      try {
        cc = closed_form::g_cc_exact_series(signal, span, n, settings);
      } catch (const QuadratureBudgetError& e) {
        row.budget_failed = true;
        cc = e.best();
      }
      row.estimate.g_cc_w_per_thz = cc.value;
      row.quad_error = cc.error;
      break;
    }
    case Method::SinInt:
    case Method::SiApp:
    case Method::Plateau:
    case Method::LowerBound: {
      const auto cc = request.method == Method::SinInt  ? closed_form::CcMethod::SinInt
                      : request.method == Method::SiApp ? closed_form::CcMethod::SiApp
                      : request.method == Method::Plateau
                          ? closed_form::CcMethod::Plateau
                          : closed_form::CcMethod::LowerBound;
      row.estimate = closed_form::g_nli_total(signal, span, n, cc, settings);
      break;
    }
    case Method::Heterogeneous: {
      double inc = 0.0;
      for (const FiberSpan& s : link.spans()) inc += closed_form::g_inc_closed(signal, s, 1);
      row.estimate.g_inc_w_per_thz = inc;
      row.estimate.g_cc_w_per_thz = closed_form::g_cc_heterogeneous(link, signal, request.si_mode);
      break;
    }
  }
  row.method = request.method;
  row.required = request.required;
  row.estimate.method = request.method;
  if (row.quad_error) row.estimate.quad_error = *row.quad_error;
  add_link_warnings(row.estimate, link);
  if (row.budget_failed) add_warning(row.estimate.warnings, Warning::QuadBudgetExhausted);
  return row;
}

std::vector<ComparisonRow> run(const ScenarioConfig& config, RunMode mode, int threads) {
  const std::vector<Point> points = points_for(config, mode);
  std::vector<MethodRequest> methods = config.methods;
  if (mode == RunMode::Single) {
    methods.erase(std::remove_if(methods.begin(), methods.end(),
                                 [&](const MethodRequest& m) {
                                   return m.method != config.reference;
                                 }),
                  methods.end());
  }
  const std::size_t n_tasks = points.size() * methods.size();
  std::vector<std::optional<ComparisonRow>> slots(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const Point& p = points[t / methods.size()];
      try {
        slots[t] = evaluate_method(methods[t % methods.size()], p.link, p.signal,
                                   config.quadrature);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n_tasks, 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ComparisonRow> rows;
  rows.reserve(n_tasks);
  const bool swept = mode == RunMode::Sweep && config.sweep.has_value();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const std::size_t first = rows.size();
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      ComparisonRow row = std::move(*slots[pi * methods.size() + mi]);
      row.scenario = config.name;
      if (swept) {
        row.sweep_param = std::string(to_string(config.sweep->axis));
        row.sweep_value = points[pi].sweep_value;
      }
      if (config.rolloff && *config.rolloff > 0.3) {
        add_warning(row.estimate.warnings, Warning::RolloffHigh);
      }
      rows.push_back(std::move(row));
    }
    const auto ref = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(first), rows.end(),
                                  [&](const ComparisonRow& r) { return r.method == config.reference; });
    if (ref == rows.end()) continue;
    const double ref_total = ref->estimate.total_w_per_thz();
    for (auto it = rows.begin() + static_cast<std::ptrdiff_t>(first); it != rows.end(); ++it) {
      if (it == ref) {
        it->delta_db_vs_ref = 0.0;
      } else if (ref_total > 0.0 && it->estimate.total_w_per_thz() > 0.0) {
        it->delta_db_vs_ref = 10.0 * std::log10(it->estimate.total_w_per_thz() / ref_total);
      }
    }
  }
  return rows;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

void write_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << kCsvHeader << "\r\n";
  for (const ComparisonRow& r : rows) {
    std::string warnings;
    for (Warning w : r.estimate.warnings) {
      if (!warnings.empty()) warnings += ';';
      warnings += to_string(w);
    }
    out << csv_field(r.scenario) << ',' << to_string(r.method) << ','
        << csv_field(r.sweep_param) << ',' << optional_number(r.sweep_value) << ','
        << format_number(r.estimate.g_inc_w_per_thz) << ','
        << format_number(r.estimate.g_cc_w_per_thz) << ','
        << format_number(r.estimate.total_w_per_thz()) << ','
        << optional_number(r.delta_db_vs_ref) << ',' << optional_number(r.quad_error) << ','
        << csv_field(warnings) << "\r\n";
  }
}

void emit_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace nli::harness
