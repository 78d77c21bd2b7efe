#include "nli/closed_form.hpp"
#include "nli/gnrf_oracle.hpp"
#include "nli/harness.hpp"
#include "nli/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>

namespace nli::harness {

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

struct Check {
  std::string name;
  std::function<std::string(bool&)> body;  // sets ok, returns a detail line
};

FiberSpan smf() { return FiberSpan({100.0, loss_coeff_from_db_per_km(0.2), 21.0, 1.3}); }
FiberSpan nzdsf() { return FiberSpan({100.0, loss_coeff_from_db_per_km(0.22), 4.0, 1.5}); }

std::string fmt(const char* label, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.3e", label, v);
  return buf;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  QuadratureSettings tight;
  tight.rel_tol = 1e-10;
  const SignalSpec sig(1.0, 0.032);

  const std::vector<Check> checks = {
      {"ei_conjugate_symmetry",
       [](bool& ok) {
         std::mt19937_64 rng(11);
         std::uniform_real_distribution<double> re(-20.0, 20.0), im(0.01, 50.0);
         double worst = 0.0;
         for (int i = 0; i < 200; ++i) {
           const specfun::complex z{re(rng), im(rng)};
           const auto a = specfun::ei_complex(z);
           const auto b = specfun::ei_complex(std::conj(z));
           worst = std::max(worst, std::abs(a - std::conj(b)) / std::abs(a));
         }
         ok = worst <= 1e-12;
         return fmt("max_rel", worst);
       }},
      {"q1_closed_vs_quadrature",
       [&](bool& ok) {
         double worst = 0.0;
         for (double b : {0.05, 1.0}) {
           for (double h : {1.0, 400.0}) {
             for (int n : {1, 5}) {
               const double c = closed_form::q1_closed({b, 0.016, h, n});
               worst = std::max(worst, rel_diff(c, oracle::q1_quadrature(b, 0.016, h, n, tight).value));
             }
           }
         }
         ok = worst <= 1e-8;
         return fmt("max_rel", worst);
       }},
      {"cisi_vs_ei_form",
       [](bool& ok) {
         std::mt19937_64 rng(5);
         std::uniform_real_distribution<double> ub(0.05, 1.0), uh(1.0, 400.0), uq(0.016, 0.25);
         double worst = 0.0;
         for (int i = 0; i < 20; ++i) {
           const closed_form::Q1Params p(ub(rng), uq(rng), (i % 2 ? -1.0 : 1.0) * uh(rng), 4);
           const int n = 1 + i % 3;
           worst = std::max(worst, rel_diff(closed_form::cos_lorentzian_integral(p, n),
                                            closed_form::cos_lorentzian_integral_cisi(p, n)));
         }
         ok = worst <= 1e-10;
         return fmt("max_rel", worst);
       }},
      {"incoherent_vs_single_span_oracle",
       [&](bool& ok) {
         const auto o = oracle::g_nli_2d(sig, smf(), 1, oracle::DomainShape::Square,
                                         oracle::EfficiencyModel::Lorentzian, tight);
         const double d = rel_diff(3.0 * o.value, closed_form::g_inc_closed(sig, smf(), 3));
         ok = d <= 1e-6;
         return fmt("rel", d);
       }},
      {"exact_decomposition",
       [&](bool& ok) {
         const auto o = oracle::g_nli_2d(sig, smf(), 3, oracle::DomainShape::Square,
                                         oracle::EfficiencyModel::Lorentzian, tight);
         const double c = closed_form::g_inc_closed(sig, smf(), 3) +
                          closed_form::g_cc_exact_series(sig, smf(), 3, tight).value;
         const double d = rel_diff(o.value, c);
         ok = d <= 1e-6;
         return fmt("rel", d);
       }},
      {"sinint_vs_sinc_quadrature",
       [&](bool& ok) {
         const double d = rel_diff(closed_form::g_cc_sinint(sig, nzdsf(), 5),
                                   oracle::g_cc_sinc_quadrature(sig, nzdsf(), 5, tight).value);
         ok = d <= 1e-8;
         return fmt("rel", d);
       }},
      {"lower_bound_below_siapp",
       [](bool& ok) {
         ok = true;
         double worst = 0.0;
         for (double bw : {0.004, 0.01, 0.032}) {
           const SignalSpec s(1.0, bw);
           for (int n : {2, 7, 40}) {
             const double lb = closed_form::g_cc_lower_bound(s, nzdsf(), n);
             const double sa = closed_form::g_cc_siapp(s, nzdsf(), n);
             ok = ok && lb <= sa;
             worst = std::max(worst, (lb - sa) / sa);
           }
         }
         return fmt("max_excess", worst);
       }},
      {"plateau_equality",
       [&](bool& ok) {
         const double a = closed_form::g_cc_siapp(sig, smf(), 10);
         const double b = closed_form::g_cc_plateau(sig, smf(), 10);
         const double c = closed_form::g_cc_lower_bound(sig, smf(), 10);
         ok = a == b && a == c;
         return fmt("rel_lower_bound", rel_diff(a, c));
       }},
      {"heterogeneous_reduction",
       [&](bool& ok) {
         const double h = closed_form::g_cc_heterogeneous(LinkConfig::homogeneous(smf(), 10), sig,
                                                          closed_form::SiMode::SiApp);
         const double d = rel_diff(h, closed_form::g_cc_lower_bound(sig, smf(), 10));
         ok = d <= 1e-14;
         return fmt("rel", d);
       }},
      {"weight_sum_identity",
       [](bool& ok) {
         double worst = 0.0;
         for (int n = 2; n <= 50; ++n) {
           const double closed = 1.0 - n + n * specfun::harnum(n - 1);
           worst = std::max(worst, rel_diff(closed_form::coherence_weight_sum(n), closed));
         }
         ok = worst <= 1e-13;
         return fmt("max_rel", worst);
       }},
  };

  bool all = true;
  for (const Check& c : checks) {
    bool ok = false;
    std::string detail;
    try {
      detail = c.body(ok);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    all = all && ok;
    out << (ok ? "PASS " : "FAIL ") << c.name << " " << detail << "\n";
  }
  return all;
}

}  // namespace nli::harness
