#pragma once

// Strong-error estimation on coupled paths, empirical rate fits, and the
// table of proven rate exponents.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrsde/coefficients.hpp"
#include "irrsde/euler_maruyama.hpp"
#include "irrsde/parallel.hpp"
#include "irrsde/rng.hpp"

namespace irrsde {

enum class NormKind {
  l1_terminal,  // E|X_T - X^(n)_T|
  l1_stopping,  // E|X_tau - X^(n)_tau| at the hitting-time witness tau
  lp_sup,       // E[sup_t |X_t - X^(n)_t|^p]
  l1_sup,       // E[sup_t |X_t - X^(n)_t|]
  gamma_sup,    // E[sup_t |X_t - X^(n)_t|^gamma], 0 < gamma < 1
  diagnostic,   // increment statistics
};

struct Norm {
  NormKind kind = NormKind::l1_terminal;
  double p = 1.0;  // exponent for lp_sup, gamma for gamma_sup

  friend bool operator==(const Norm&, const Norm&) = default;
};

inline std::string norm_name(NormKind k) {
  switch (k) {
    case NormKind::l1_terminal: return "L1_terminal";
    case NormKind::l1_stopping: return "L1_stopping";
    case NormKind::lp_sup: return "Lp_sup";
    case NormKind::l1_sup: return "L1_sup";
    case NormKind::gamma_sup: return "gamma_sup";
    case NormKind::diagnostic: return "diagnostic";
  }
  return "?";
}

inline NormKind parse_norm_kind(const std::string& s) {
  for (auto k : {NormKind::l1_terminal, NormKind::l1_stopping, NormKind::lp_sup, NormKind::l1_sup,
                 NormKind::gamma_sup})
    if (norm_name(k) == s) return k;
  throw std::invalid_argument("unknown norm '" + s + "' (expected L1_terminal, L1_stopping, Lp_sup, L1_sup, gamma_sup)");
}

inline void validate_norm(const Norm& n) {
  if (n.kind == NormKind::lp_sup && !(n.p >= 1.0)) throw std::invalid_argument("Lp_sup needs p >= 1");
  if (n.kind == NormKind::gamma_sup && !(n.p > 0.0 && n.p < 1.0))
    throw std::invalid_argument("gamma_sup needs 0 < gamma < 1");
  if (n.kind == NormKind::diagnostic) throw std::invalid_argument("diagnostic is not a strong-error norm");
}

struct ErrorEstimate {
  std::size_t n = 0;
  Norm norm;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  // Lp_sup: p-th root of the mean p-th power and its delta-method SE.
  std::optional<double> root_mean;
  std::optional<double> root_std_error;
};

/// The mean brought back to the scale of |X - X^(n)|: the p-th (gamma-th)
/// root for the power norms, the mean itself otherwise.
inline double error_magnitude(const ErrorEstimate& e) {
  if (e.norm.kind == NormKind::lp_sup || e.norm.kind == NormKind::gamma_sup) return std::pow(e.mean, 1.0 / e.norm.p);
  return e.mean;
}

struct StrongErrorOptions {
  std::size_t threads = 0;  // 0: IRRSDE_THREADS or hardware
  std::optional<double> stopping_level;  // default x0 + 1/2
  std::size_t chunk = 64;
};

namespace detail {

enum Functional : std::size_t { kTerminal = 0, kSup = 1, kStopped = 2, kFunctionals = 3 };

inline double apply_power(NormKind k, double p, double v) {
  switch (k) {
    case NormKind::lp_sup:
    case NormKind::gamma_sup:
      return std::pow(v, p);
    default:
      return v;
  }
}

inline Functional functional_of(NormKind k) {
  switch (k) {
    case NormKind::l1_terminal: return kTerminal;
    case NormKind::l1_stopping: return kStopped;
    default: return kSup;
  }
}

}  // namespace detail

/// Simulates, for every path, the reference EM path with
/// n_ref = n_ref_factor * max(n_list) steps and each level in n_list on the
/// same Brownian path, and returns one estimate per (norm, n), norm-major.
inline std::vector<ErrorEstimate> strong_error(const SdeProblem& problem, std::span<const Norm> norms,
                                               std::span<const std::size_t> n_list, std::size_t n_ref_factor,
                                               std::size_t paths, std::uint64_t seed,
                                               const StrongErrorOptions& opt = {}) {
  if (norms.empty()) throw std::invalid_argument("strong_error: no norms requested");
  for (const auto& nm : norms) validate_norm(nm);
  if (n_list.empty()) throw std::invalid_argument("strong_error: empty n_list");
  if (n_ref_factor == 0) throw std::invalid_argument("strong_error: n_ref_factor must be positive");
  if (paths < 2) throw std::invalid_argument("strong_error: need at least 2 paths");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const std::size_t n_ref = n_ref_factor * n_max;
  for (std::size_t n : n_list) dyadic_depth(n_ref, n);

  const std::size_t L = n_list.size();
  const double level = opt.stopping_level.value_or(problem.x0 + 0.5);
  const double side0 = problem.x0 - level;
  std::vector<double> slots(paths * L * detail::kFunctionals);

  parallel_for_chunks(paths, resolve_workers(opt.threads), opt.chunk, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sup(L), stopped(L), terminal(L);
    std::vector<char> done(L);
    for (std::size_t path = begin; path < end; ++path) {
      std::fill(sup.begin(), sup.end(), 0.0);
      std::fill(terminal.begin(), terminal.end(), 0.0);
      std::fill(stopped.begin(), stopped.end(), 0.0);
      // tau = 0 when the path starts on the level.
      std::fill(done.begin(), done.end(), side0 == 0.0 ? 1 : 0);
      NormalStream normals(seed, path, StreamDomain::brownian);
      simulate_coupled(problem, n_ref, n_list, normals, [&](std::size_t j, std::size_t, double x, double xr) {
        const double e = std::abs(x - xr);
        sup[j] = std::max(sup[j], e);
        terminal[j] = e;
        if (!done[j] && (xr - level) * side0 <= 0.0) {
          done[j] = 1;
          stopped[j] = e;
        }
      });
      double* out = &slots[path * L * detail::kFunctionals];
      for (std::size_t j = 0; j < L; ++j) {
        out[j * detail::kFunctionals + detail::kTerminal] = terminal[j];
        out[j * detail::kFunctionals + detail::kSup] = sup[j];
        double at_tau = terminal[j];  // tau = T when the level is never reached
        if (side0 == 0.0) at_tau = 0.0;
        else if (done[j]) at_tau = stopped[j];
        out[j * detail::kFunctionals + detail::kStopped] = at_tau;
      }
    }
  });

  std::vector<ErrorEstimate> out;
  std::vector<double> column(paths);
  for (const auto& nm : norms) {
    const auto f = detail::functional_of(nm.kind);
    for (std::size_t j = 0; j < L; ++j) {
      for (std::size_t path = 0; path < paths; ++path)
        column[path] = detail::apply_power(nm.kind, nm.p, slots[(path * L + j) * detail::kFunctionals + f]);
      const auto s = summarize(column);
      ErrorEstimate e{n_list[j], nm, s.mean, s.std_error, paths, std::nullopt, std::nullopt};
      if (nm.kind == NormKind::lp_sup) {
        e.root_mean = std::pow(s.mean, 1.0 / nm.p);
        e.root_std_error = s.mean > 0.0 ? s.std_error / (nm.p * std::pow(s.mean, (nm.p - 1.0) / nm.p)) : 0.0;
      }
      out.push_back(e);
    }
  }
  return out;
}

inline double gamma_prefactor(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  return (2.0 - gamma) / (1.0 - gamma);
}

inline std::vector<ErrorEstimate> gamma_sup_error(const SdeProblem& problem, double gamma,
                                                  std::span<const std::size_t> n_list, std::size_t n_ref_factor,
                                                  std::size_t paths, std::uint64_t seed,
                                                  const StrongErrorOptions& opt = {}) {
  gamma_prefactor(gamma);
  const Norm norm{NormKind::gamma_sup, gamma};
  return strong_error(problem, std::span<const Norm>(&norm, 1), n_list, n_ref_factor, paths, seed, opt);
}

// ---------------------------------------------------------------------------
// Rate fits.

enum class RateMode { polynomial, logarithmic };

inline std::string rate_mode_name(RateMode m) { return m == RateMode::polynomial ? "polynomial" : "logarithmic"; }

struct RateFit {
  std::vector<std::pair<std::size_t, double>> points;
  double slope = 0.0;  // error ~ n^{-slope} or (log n)^{-slope}
  double intercept = 0.0;
  double r_squared = 0.0;
  RateMode mode = RateMode::polynomial;
};

/// Weighted least squares of log(mean) on -log(n) (or -log(log n)), weights
/// (mean / SE)^2. When any SE is zero the fit is unweighted.
inline RateFit fit_rate(std::span<const ErrorEstimate> estimates, RateMode mode = RateMode::polynomial) {
  if (estimates.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 estimates");
  RateFit fit;
  fit.mode = mode;
  bool weighted = true;
  for (const auto& e : estimates) {
    if (!(e.mean > 0.0))
      throw std::invalid_argument("fit_rate: nonpositive mean error at n=" + std::to_string(e.n) +
                                  " (exact scheme or broken coupling?)");
    if (!(e.std_error > 0.0)) weighted = false;
    if (mode == RateMode::logarithmic && e.n < 2) throw std::invalid_argument("fit_rate: log mode needs n >= 2");
    fit.points.emplace_back(e.n, e.mean);
  }
  const std::size_t m = estimates.size();
  std::vector<double> x(m), y(m), w(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& e = estimates[i];
    const double ln = std::log(static_cast<double>(e.n));
    x[i] = mode == RateMode::polynomial ? -ln : -std::log(ln);
    y[i] = std::log(e.mean);
    const double rel = e.std_error / e.mean;
    w[i] = weighted ? 1.0 / (rel * rel) : 1.0;
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: step counts must not all coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += w[i] * r * r;
  }
  // Constant data are fitted exactly by a zero slope.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Proven rate exponents.

struct RateQuery {
  double alpha = 0.5;  // sigma is (1/2 + alpha)-Hoelder
  double beta = 1.0;   // Hoelder exponent of b_H
  Norm norm;
  bool l1_drift = true;       // b in L1; otherwise a subpolynomial factor applies
  bool hoelder_only = false;  // b_A = 0
};

struct RateDescriptor {
  RateMode mode = RateMode::polynomial;
  double exponent = 0.0;  // error <= C n^{-exponent} or C (log n)^{-exponent}
  bool subpolynomial_correction = false;  // extra exp(C sqrt(log n)) factor
  std::string bound;
};

inline RateDescriptor theoretical_rate(const RateQuery& q) {
  if (!(q.alpha >= 0.0 && q.alpha <= 0.5)) throw std::invalid_argument("theoretical_rate: alpha must lie in [0, 1/2]");
  if (!(q.beta > 0.0 && q.beta <= 1.0)) throw std::invalid_argument("theoretical_rate: beta must lie in (0, 1]");
  validate_norm(q.norm);
  const double a = q.alpha, b = q.beta;
  // Lipschitz sigma with a pure Hoelder drift: E[sup|err|^p] <= C n^{-p beta/2}, p >= 1.
  const bool hoelder_lipschitz = q.hoelder_only && a == 0.5 && q.l1_drift;

  RateDescriptor r;
  r.subpolynomial_correction = !q.l1_drift;
  auto log_mode = [&](double e, const char* bound) {
    r.mode = RateMode::logarithmic;
    r.exponent = e;
    r.bound = bound;
  };
  auto poly = [&](double e, const char* bound) {
    r.mode = RateMode::polynomial;
    r.exponent = e;
    r.bound = bound;
  };

  switch (q.norm.kind) {
    case NormKind::l1_terminal:
    case NormKind::l1_stopping:
      if (a == 0.0) log_mode(1.0, "sup over stopping times of E|err_tau| <= C/log n");
      else if (hoelder_lipschitz) poly(b / 2.0, "E[sup|err|^p] <= C n^{-p beta/2} with p = 1");
      else poly(std::min(b / 2.0, a), "sup over stopping times of E|err_tau| <= C n^{-(beta/2 ^ alpha)}");
      break;
    case NormKind::gamma_sup:
      if (a == 0.0) log_mode(q.norm.p, "E[sup|err|^gamma] <= (2-gamma)/(1-gamma) (C/log n)^gamma");
      else poly(q.norm.p * std::min(b / 2.0, a), "E[sup|err|^gamma] <= (2-gamma)/(1-gamma) (C n^{-(beta/2 ^ alpha)})^gamma");
      break;
    case NormKind::l1_sup:
      if (a == 0.0) log_mode(0.5, "E[sup|err|] <= C/sqrt(log n)");
      else if (hoelder_lipschitz) poly(b / 2.0, "E[sup|err|^p] <= C n^{-p beta/2} with p = 1");
      else poly(a * std::min(b, 2.0 * a), "E[sup|err|] <= C n^{-alpha (beta ^ 2 alpha)}");
      break;
    case NormKind::lp_sup: {
      const double p = q.norm.p;
      if (hoelder_lipschitz) {
        poly(p * b / 2.0, "E[sup|err|^p] <= C n^{-p beta/2}");
      } else if (p == 1.0) {
        return theoretical_rate(RateQuery{a, b, Norm{NormKind::l1_sup, 1.0}, q.l1_drift, q.hoelder_only});
      } else if (p < 2.0) {
        throw std::invalid_argument("theoretical_rate: no bound for Lp_sup with 1 < p < 2 unless b_A = 0 and alpha = 1/2");
      } else if (a == 0.0) {
        log_mode(1.0, "E[sup|err|^p] <= C/log n");
      } else if (a < 0.5) {
        poly(std::min(b / 2.0, a), "E[sup|err|^p] <= C n^{-(beta/2 ^ alpha)}");
      } else {
        poly(std::min(0.5, p * b / 2.0), "E[sup|err|^p] <= C n^{-(1/2 ^ p beta/2)}");
      }
      break;
    }
    case NormKind::diagnostic:
      break;
  }
  return r;
}

/// Shape of the gamma-sup bound with unit constant: prefactor * rate^gamma.
inline double gamma_bound_shape(double gamma, const RateDescriptor& base, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double rate = base.mode == RateMode::polynomial ? std::pow(nd, -base.exponent)
                                                        : std::pow(std::log(nd), -base.exponent);
  return gamma_prefactor(gamma) * std::pow(rate, gamma);
}

}  // namespace irrsde
