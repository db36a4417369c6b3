#pragma once

// Runs an ExperimentConfig: strong errors per norm, rate fits, comparison
// with the proven exponents, CSV report and summary table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/brownian.hpp"
#include "irrsde/config.hpp"
#include "irrsde/diagnostics.hpp"
#include "irrsde/error_stats.hpp"
#include "irrsde/euler_maruyama.hpp"
#include "irrsde/gallery.hpp"
#include "irrsde/transform.hpp"

namespace irrsde {

/// Allowed shortfall of the fitted slope below the proven exponent.
inline constexpr double kGateTolerance = 0.1;
/// Errors at or below this are treated as zero (EM exact for the problem).
inline constexpr double kExactThreshold = 1e-12;

struct RateComparison {
  Norm norm;
  std::optional<RateFit> fit;  // empty for an exact scheme or a failed fit
  RateDescriptor theory;
  bool gated = false;
  bool passed = true;
  std::string note;
};

struct VariantReport {
  std::string label;  // problem name, with [m=..] for truncated drifts
  std::optional<int> truncation_m;
  std::vector<ErrorEstimate> estimates;  // norm-major
  std::vector<RateComparison> rates;
  bool exact_scheme = false;
  std::optional<MartingaleReport> martingale;
  std::size_t martingale_steps = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<VariantReport> variants;

  bool gates_passed() const {
    for (const auto& v : variants)
      for (const auto& r : v.rates)
        if (r.gated && !r.passed) return false;
    return true;
  }
};

inline SdeProblem config_problem(const ExperimentConfig& c) {
  ParamMap overrides = c.problem.params;
  overrides["x0"] = c.problem.x0;
  overrides["T"] = c.problem.horizon;
  return gallery_problem(c.problem.name, overrides);
}

inline RateQuery rate_query(const SdeProblem& original, const Norm& norm) {
  RateQuery q;
  q.alpha = original.diffusion.alpha;
  q.beta = original.drift.beta();
  q.norm = norm;
  q.l1_drift = original.drift.integrable();
  q.hoelder_only = !original.drift.class_a_part.has_value();
  return q;
}

namespace detail {

inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline RateComparison compare_rate(const SdeProblem& original, const Norm& norm,
                                   std::span<const ErrorEstimate> estimates, bool gates) {
  RateComparison r;
  r.norm = norm;
  try {
    r.theory = theoretical_rate(rate_query(original, norm));
  } catch (const std::invalid_argument& e) {
    r.note = std::string("no proven rate: ") + e.what();
    return r;
  }
  try {
    r.fit = fit_rate(estimates, r.theory.mode);
  } catch (const std::invalid_argument& e) {
    r.note = std::string("fit failed: ") + e.what();
    r.gated = gates;
    r.passed = false;
    return r;
  }
  r.gated = gates;
  r.passed = r.fit->slope >= r.theory.exponent - kGateTolerance;
  return r;
}

inline void dump_paths(const SdeProblem& problem, const ExperimentConfig& c, std::size_t n_ref) {
  const std::size_t n = c.n_list.back();
  std::vector<EmPath> paths;
  paths.reserve(c.paths);
  for (std::size_t i = 0; i < c.paths; ++i)
    paths.push_back(em_path(problem, sample_grid(problem.horizon, n_ref, c.seed, i), n));
  std::ofstream out(*c.path_dump, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open path dump " + *c.path_dump);
  write_path_dump(out, paths);
}

}  // namespace detail

/// Runs every variant of the experiment. `threads` overrides the config's
/// worker count; neither affects the numbers.
inline ExperimentReport run_experiment(const ExperimentConfig& config, std::optional<std::size_t> threads = {}) {
  validate_config(config);
  const SdeProblem original = config_problem(config);
  if (config.martingale_check && !original.drift.integrable() && config.truncation_m.empty())
    throw ConfigError("truncation_m", "the drift of " + config.problem.name +
                                          " is not integrable; the martingale check needs a truncation level");

  const auto norms = config_norms(config);
  StrongErrorOptions opt;
  opt.threads = threads.value_or(config.threads);
  opt.stopping_level = config.stopping_level;
  const std::size_t n_ref = config.n_ref_factor * config.n_list.back();

  ExperimentReport report;
  report.config = config;
  std::vector<std::optional<int>> ms;
  if (config.truncation_m.empty()) ms.push_back(std::nullopt);
  for (int m : config.truncation_m) ms.push_back(m);

  for (const auto& m : ms) {
    VariantReport v;
    v.label = config.problem.name;
    v.truncation_m = m;
    SdeProblem problem = original;
    if (m) {
      problem.drift = truncate_drift(original.drift, *m);
      v.label += "[m=" + std::to_string(*m) + "]";
    }
    v.estimates = strong_error(problem, norms, config.n_list, config.n_ref_factor, config.paths, config.seed, opt);
    v.exact_scheme = std::all_of(v.estimates.begin(), v.estimates.end(),
                                 [](const ErrorEstimate& e) { return error_magnitude(e) <= kExactThreshold; });
    if (!v.exact_scheme) {
      const std::size_t L = config.n_list.size();
      for (std::size_t i = 0; i < norms.size(); ++i)
        v.rates.push_back(detail::compare_rate(
            original, norms[i], std::span<const ErrorEstimate>(v.estimates).subspan(i * L, L), config.gates));
    }
    if (config.martingale_check) {
      const auto tables = build_transform(problem);
      v.martingale = martingale_diagnostic(problem, tables, n_ref, config.paths, config.seed,
                                           DiagnosticOptions{opt.threads, 256});
      v.martingale_steps = n_ref;
    }
    if (config.path_dump && report.variants.empty()) detail::dump_paths(problem, config, n_ref);
    report.variants.push_back(std::move(v));
  }
  return report;
}

/// Columns problem,norm,p,n,paths,mean,std_error,seed, then '#'-prefixed
/// trailer blocks with the rate fits and the martingale check.
inline void write_report_csv(std::ostream& os, const ExperimentReport& r) {
  using detail::g17;
  const auto& c = r.config;
  os << "problem,norm,p,n,paths,mean,std_error,seed\n";
  for (const auto& v : r.variants) {
    for (const auto& e : v.estimates) {
      os << v.label << ',' << norm_name(e.norm.kind) << ',' << g17(e.norm.p) << ',' << e.n << ',' << e.paths << ','
         << g17(e.mean) << ',' << g17(e.std_error) << ',' << c.seed << '\n';
      if (e.root_mean)
        os << v.label << ",Lp_sup_root," << g17(e.norm.p) << ',' << e.n << ',' << e.paths << ',' << g17(*e.root_mean)
           << ',' << g17(*e.root_std_error) << ',' << c.seed << '\n';
    }
  }
  os << "# rate_fit\n";
  os << "# problem,norm,p,mode,slope,intercept,r_squared,theoretical_exponent,subpolynomial_correction,gate\n";
  for (const auto& v : r.variants) {
    if (v.exact_scheme) {
      os << "# " << v.label << ",exact_scheme\n";
      continue;
    }
    for (const auto& rc : v.rates) {
      os << "# " << v.label << ',' << norm_name(rc.norm.kind) << ',' << g17(rc.norm.p) << ','
         << rate_mode_name(rc.theory.mode) << ',';
      if (rc.fit) os << g17(rc.fit->slope) << ',' << g17(rc.fit->intercept) << ',' << g17(rc.fit->r_squared);
      else os << ",,";
      os << ',' << g17(rc.theory.exponent) << ',' << (rc.theory.subpolynomial_correction ? "true" : "false") << ','
         << (!rc.gated ? "off" : rc.passed ? "pass" : "fail") << '\n';
    }
  }
  bool header = false;
  for (const auto& v : r.variants) {
    if (!v.martingale) continue;
    if (!header) {
      os << "# martingale\n# problem,n_fine,paths,mean,std_error,z_score,clamp_count\n";
      header = true;
    }
    const auto& m = *v.martingale;
    os << "# " << v.label << ',' << v.martingale_steps << ',' << m.paths << ',' << g17(m.mean) << ','
       << g17(m.std_error) << ',' << g17(m.z_score) << ',' << m.clamp_count << '\n';
  }
}

inline void write_summary(std::ostream& os, const ExperimentReport& r) {
  using detail::g6;
  const auto& c = r.config;
  os << "problem " << c.problem.name << ", paths " << c.paths << ", n_ref = " << c.n_ref_factor << " * "
     << c.n_list.back() << ", seed " << c.seed << "\n";
  for (const auto& v : r.variants) {
    os << "\n[" << v.label << "]\n";
    char line[256];
    std::snprintf(line, sizeof line, "  %-12s %8s %14s %12s\n", "norm", "n", "mean", "std_error");
    os << line;
    for (const auto& e : v.estimates) {
      std::snprintf(line, sizeof line, "  %-12s %8zu %14.6g %12.3g\n", norm_name(e.norm.kind).c_str(), e.n, e.mean,
                    e.std_error);
      os << line;
    }
    if (v.exact_scheme) {
      os << "  exact scheme: every error is below " << g6(kExactThreshold) << ", no rate fit attempted\n";
    }
    for (const auto& rc : v.rates) {
      os << "  " << norm_name(rc.norm.kind);
      if (rc.norm.kind == NormKind::lp_sup || rc.norm.kind == NormKind::gamma_sup) os << "(" << g6(rc.norm.p) << ")";
      if (rc.fit) {
        os << ": slope " << g6(rc.fit->slope) << " (R^2 " << g6(rc.fit->r_squared) << ", "
           << rate_mode_name(rc.fit->mode) << ")";
      }
      if (!rc.theory.bound.empty()) {
        os << ", proven " << g6(rc.theory.exponent);
        if (rc.theory.subpolynomial_correction) os << " up to exp(C sqrt(log n))";
      }
      if (rc.gated) os << (rc.passed ? "  PASS" : "  FAIL");
      if (!rc.note.empty()) os << "  [" << rc.note << "]";
      os << "\n";
    }
    if (v.martingale) {
      const auto& m = *v.martingale;
      os << "  martingale check at n=" << v.martingale_steps << ": mean " << g6(m.mean) << " +- " << g6(m.std_error)
         << ", z " << g6(m.z_score) << ", clamps " << m.clamp_count << "\n";
    }
  }
  os << "\ngates: " << (r.gates_passed() ? "all passed" : "FAILED") << "\n";
}

/// Runs the experiment, writes the CSV to config.output and the summary to
/// `summary`. Returns true iff every enabled gate passed.
inline bool run_and_report(const ExperimentConfig& config, std::ostream& summary,
                           std::optional<std::size_t> threads = {}) {
  const auto report = run_experiment(config, threads);
  std::ofstream csv(config.output);
  if (!csv) throw std::runtime_error("cannot open output " + config.output);
  write_report_csv(csv, report);
  write_summary(summary, report);
  return report.gates_passed();
}

}  // namespace irrsde
