#pragma once

// Drift and diffusion coefficients of dX = b(X) dt + sigma(X) dW.
//
// The drift splits as b = b_A + b_H: b_A is built from bounded monotone
// pieces combined by sums, scalar multiples and products (a class closed
// under these operations, so membership holds by construction), b_H is a
// bounded beta-Hoelder function. All coefficient objects are immutable once
// built and safe to evaluate concurrently.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace irrsde {

using RealFn = std::function<double(double)>;

struct HoelderFn {
  RealFn evaluate;
  double beta = 1.0;
  double hoelder_norm = 0.0;  // sup norm + Hoelder seminorm

  double operator()(double x) const { return evaluate(x); }
};

inline HoelderFn make_hoelder(RealFn fn, double beta, double hoelder_norm) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("HoelderFn: beta must lie in (0, 1]");
  if (!(hoelder_norm >= 0.0)) throw std::invalid_argument("HoelderFn: norm must be nonnegative");
  return HoelderFn{std::move(fn), beta, hoelder_norm};
}

/// Bounded monotone primitive; `jumps` lists its discontinuities.
struct MonotonePiece {
  std::string label;
  RealFn evaluate;
  double bound = 0.0;
  bool increasing = true;
  std::vector<double> jumps;
};

/// 3t^2 - 2t^3 on [0, 1], clamped outside. C^1 with max slope 3/2.
inline double smoothstep(double t) noexcept {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

inline double smoothstep_derivative(double t) noexcept {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 6.0 * t * (1.0 - t);
}

namespace pieces {

/// 1{x >= at} (closed) or 1{x > at}.
inline MonotonePiece step_up(double at, bool closed = true) {
  std::ostringstream os;
  os << "1{x" << (closed ? ">=" : ">") << at << "}";
  RealFn fn = closed ? RealFn([at](double x) { return x >= at ? 1.0 : 0.0; })
                     : RealFn([at](double x) { return x > at ? 1.0 : 0.0; });
  return {os.str(), std::move(fn), 1.0, true, {at}};
}

/// 1{x < at} (open) or 1{x <= at}.
inline MonotonePiece step_down(double at, bool closed = false) {
  std::ostringstream os;
  os << "1{x" << (closed ? "<=" : "<") << at << "}";
  RealFn fn = closed ? RealFn([at](double x) { return x <= at ? 1.0 : 0.0; })
                     : RealFn([at](double x) { return x < at ? 1.0 : 0.0; });
  return {os.str(), std::move(fn), 1.0, false, {at}};
}

/// sign(x) with sign(0) = 0.
inline MonotonePiece sign() {
  return {"sign", [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }, 1.0, true, {0.0}};
}

inline MonotonePiece clamp(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("pieces::clamp: lo must be < hi");
  std::ostringstream os;
  os << "clamp(x," << lo << "," << hi << ")";
  return {os.str(), [lo, hi](double x) { return std::clamp(x, lo, hi); }, std::max(std::abs(lo), std::abs(hi)),
          true, {}};
}

/// smoothstep((x - start) / width): 0 left of start, 1 right of start + width.
inline MonotonePiece smooth_ramp_up(double start, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("pieces::smooth_ramp_up: width must be positive");
  std::ostringstream os;
  os << "ramp_up(" << start << "," << width << ")";
  return {os.str(), [start, width](double x) { return smoothstep((x - start) / width); }, 1.0, true, {}};
}

/// 1 - smoothstep((x - start) / width).
inline MonotonePiece smooth_ramp_down(double start, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("pieces::smooth_ramp_down: width must be positive");
  std::ostringstream os;
  os << "ramp_down(" << start << "," << width << ")";
  return {os.str(), [start, width](double x) { return 1.0 - smoothstep((x - start) / width); }, 1.0, false, {}};
}

inline MonotonePiece constant(double c) {
  std::ostringstream os;
  os << c;
  return {os.str(), [c](double) { return c; }, std::abs(c), true, {}};
}

/// User-supplied primitive; monotonicity and the bound are checked by
/// verify_regularity, not here.
inline MonotonePiece custom(std::string label, RealFn fn, double bound, bool increasing,
                            std::vector<double> jumps = {}) {
  if (!(bound >= 0.0)) throw std::invalid_argument("pieces::custom: bound must be nonnegative");
  return {std::move(label), std::move(fn), bound, increasing, std::move(jumps)};
}

}  // namespace pieces

/// Expression tree over monotone pieces using only sums, scalar multiples
/// and products.
class ClassAFn {
 public:
  enum class Op { piece, sum, scale, product };

  explicit ClassAFn(MonotonePiece piece) {
    auto node = std::make_shared<Node>();
    node->op = Op::piece;
    // Bounded monotone zeta: the mollified sequence keeps the sup bound and
    // its derivative mass is the total variation, at most 2 * bound.
    node->bound = piece.bound;
    node->norm = 2.0 * piece.bound;
    node->piece = std::move(piece);
    root_ = std::move(node);
  }

  double operator()(double x) const { return eval(*root_, x); }

  double sup_bound() const noexcept { return root_->bound; }
  double class_a_norm() const noexcept { return declared_norm_.value_or(root_->norm); }

  /// Overrides the propagated norm with a caller-declared K_A.
  ClassAFn with_declared_norm(double k) const {
    if (!(k >= 0.0)) throw std::invalid_argument("ClassAFn: declared norm must be nonnegative");
    ClassAFn out = *this;
    out.declared_norm_ = k;
    return out;
  }

  Op op() const noexcept { return root_->op; }

  std::vector<MonotonePiece> pieces() const {
    std::vector<MonotonePiece> out;
    collect(*root_, out);
    return out;
  }

  std::vector<double> jumps() const {
    std::vector<double> out;
    for (const auto& p : pieces()) out.insert(out.end(), p.jumps.begin(), p.jumps.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Visits every operation node in pre-order.
  template <class F>
  void for_each_op(F&& f) const {
    visit(*root_, f);
  }

  std::string describe() const {
    std::ostringstream os;
    print(*root_, os);
    return os.str();
  }

  friend ClassAFn operator+(const ClassAFn& a, const ClassAFn& b) {
    auto node = std::make_shared<Node>();
    node->op = Op::sum;
    node->left = a.root_;
    node->right = b.root_;
    node->bound = a.root_->bound + b.root_->bound;
    node->norm = a.class_a_norm() + b.class_a_norm();
    return ClassAFn(std::move(node));
  }

  friend ClassAFn operator*(double c, const ClassAFn& a) {
    auto node = std::make_shared<Node>();
    node->op = Op::scale;
    node->scalar = c;
    node->left = a.root_;
    node->bound = std::abs(c) * a.root_->bound;
    node->norm = std::abs(c) * a.class_a_norm();
    return ClassAFn(std::move(node));
  }

  friend ClassAFn operator*(const ClassAFn& a, const ClassAFn& b) {
    auto node = std::make_shared<Node>();
    node->op = Op::product;
    node->left = a.root_;
    node->right = b.root_;
    const double ba = a.root_->bound, bb = b.root_->bound;
    node->bound = ba * bb;
    // (xi zeta)' = xi' zeta + xi zeta'; the sup term is at most 2 ba bb.
    node->norm = std::max(ba * b.class_a_norm() + bb * a.class_a_norm(), 2.0 * ba * bb);
    return ClassAFn(std::move(node));
  }

 private:
  struct Node {
    Op op = Op::piece;
    double scalar = 1.0;
    std::shared_ptr<const Node> left, right;
    MonotonePiece piece;
    double bound = 0.0;
    double norm = 0.0;
  };

  explicit ClassAFn(std::shared_ptr<const Node> node) : root_(std::move(node)) {}

  static double eval(const Node& n, double x) {
    switch (n.op) {
      case Op::piece:
        return n.piece.evaluate(x);
      case Op::sum:
        return eval(*n.left, x) + eval(*n.right, x);
      case Op::scale:
        return n.scalar * eval(*n.left, x);
      case Op::product:
        return eval(*n.left, x) * eval(*n.right, x);
    }
    return 0.0;
  }

  static void collect(const Node& n, std::vector<MonotonePiece>& out) {
    if (n.op == Op::piece) {
      out.push_back(n.piece);
      return;
    }
    if (n.left) collect(*n.left, out);
    if (n.right) collect(*n.right, out);
  }

  template <class F>
  static void visit(const Node& n, F& f) {
    f(n.op);
    if (n.left) visit(*n.left, f);
    if (n.right) visit(*n.right, f);
  }

  static void print(const Node& n, std::ostream& os) {
    switch (n.op) {
      case Op::piece:
        os << n.piece.label;
        return;
      case Op::sum:
        os << "(";
        print(*n.left, os);
        os << " + ";
        print(*n.right, os);
        os << ")";
        return;
      case Op::scale:
        os << n.scalar << "*";
        print(*n.left, os);
        return;
      case Op::product:
        os << "(";
        print(*n.left, os);
        os << " * ";
        print(*n.right, os);
        os << ")";
        return;
    }
  }

  std::shared_ptr<const Node> root_;
  std::optional<double> declared_norm_;
};

struct DriftSpec {
  std::optional<ClassAFn> class_a_part;
  std::optional<HoelderFn> hoelder_part;
  double sup_bound = 0.0;
  std::optional<double> l1_norm;  // nullopt: not integrable
  std::vector<double> breakpoints;

  double operator()(double x) const {
    double v = 0.0;
    if (class_a_part) v += (*class_a_part)(x);
    if (hoelder_part) v += (*hoelder_part)(x);
    return v;
  }

  bool integrable() const noexcept { return l1_norm.has_value(); }
  bool is_zero() const noexcept { return !class_a_part && !hoelder_part; }
  /// Hoelder exponent of the drift's continuous part (1 when it is absent).
  double beta() const noexcept { return hoelder_part ? hoelder_part->beta : 1.0; }
};

/// sup_bound defaults to ||b_A||_inf + ||b_H||_beta; pass a tighter value
/// when one is known.
inline DriftSpec make_drift(std::optional<ClassAFn> class_a, std::optional<HoelderFn> hoelder,
                            std::optional<double> l1_norm, std::optional<double> sup_bound = std::nullopt) {
  DriftSpec d;
  double bound = 0.0;
  if (class_a) {
    bound += class_a->sup_bound();
    d.breakpoints = class_a->jumps();
  }
  if (hoelder) bound += hoelder->hoelder_norm;
  if (sup_bound) {
    if (!(*sup_bound >= 0.0)) throw std::invalid_argument("DriftSpec: sup bound must be nonnegative");
    bound = *sup_bound;
  }
  if (l1_norm && !(*l1_norm >= 0.0)) throw std::invalid_argument("DriftSpec: L1 norm must be nonnegative");
  d.class_a_part = std::move(class_a);
  d.hoelder_part = std::move(hoelder);
  d.sup_bound = bound;
  d.l1_norm = l1_norm;
  return d;
}

inline double eval_drift(const DriftSpec& spec, double x) { return spec(x); }

struct DiffusionSpec {
  RealFn evaluate;
  double k_sigma = 2.0;
  double alpha = 0.5;
  std::optional<double> constant;  // set when sigma is constant (fast path)

  double operator()(double x) const { return constant ? *constant : evaluate(x); }
};

inline DiffusionSpec make_diffusion(RealFn fn, double k_sigma, double alpha) {
  if (!(k_sigma > 1.0)) throw std::invalid_argument("DiffusionSpec: K_sigma must exceed 1");
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw std::invalid_argument("DiffusionSpec: alpha must lie in [0, 1/2]");
  return DiffusionSpec{std::move(fn), k_sigma, alpha, std::nullopt};
}

inline DiffusionSpec constant_diffusion(double value, double k_sigma = 2.0) {
  if (!(value * value >= 1.0 / (k_sigma * k_sigma) && value * value <= k_sigma * k_sigma))
    throw std::invalid_argument("constant_diffusion: sigma^2 outside [1/K^2, K^2]");
  auto d = make_diffusion([value](double) { return value; }, k_sigma, 0.5);
  d.constant = value;
  return d;
}

struct SdeProblem {
  DriftSpec drift;
  DiffusionSpec diffusion;
  double x0 = 0.0;
  double horizon = 1.0;
  std::string label;
};

inline SdeProblem make_problem(DriftSpec drift, DiffusionSpec diffusion, double x0, double horizon,
                               std::string label) {
  if (!(horizon > 0.0)) throw std::invalid_argument("SdeProblem: horizon must be positive");
  if (!std::isfinite(x0)) throw std::invalid_argument("SdeProblem: x0 must be finite");
  if (!diffusion.evaluate) throw std::invalid_argument("SdeProblem: diffusion has no evaluator");
  return SdeProblem{std::move(drift), std::move(diffusion), x0, horizon, std::move(label)};
}

// ---------------------------------------------------------------------------
// Drift truncation b_m = b * g_m.

/// C^1 cutoff: 1 on [-m, m], 0 outside [-(m+2), m+2], smoothstep ramps of
/// width 2 in between (max slope 3/4).
inline double cutoff(int m, double x) noexcept {
  const double a = std::abs(x);
  return 1.0 - smoothstep((a - m) / 2.0);
}

inline double cutoff_derivative(int m, double x) noexcept {
  const double a = std::abs(x);
  const double d = -0.5 * smoothstep_derivative((a - m) / 2.0);
  return x >= 0.0 ? d : -d;
}

/// The cutoff written as a product of two monotone ramps.
inline ClassAFn cutoff_class_a(int m) {
  return ClassAFn(pieces::smooth_ramp_up(-(m + 2.0), 2.0)) * ClassAFn(pieces::smooth_ramp_down(m, 2.0));
}

inline DriftSpec truncate_drift(const DriftSpec& spec, int m) {
  if (m < 1) throw std::invalid_argument("truncate_drift: m must be >= 1");
  DriftSpec out;
  if (spec.class_a_part) out.class_a_part = (*spec.class_a_part) * cutoff_class_a(m);
  if (spec.hoelder_part) {
    const HoelderFn& h = *spec.hoelder_part;
    out.hoelder_part = HoelderFn{[fn = h.evaluate, m](double x) { return fn(x) * cutoff(m, x); }, h.beta,
                                 2.0 * h.hoelder_norm};
  }
  out.sup_bound = spec.sup_bound;
  const double support_bound = (2.0 * m + 2.0) * spec.sup_bound;
  out.l1_norm = spec.l1_norm ? std::min(*spec.l1_norm, support_bound) : support_bound;
  const double edge = m + 2.0;
  for (double x : spec.breakpoints)
    if (x > -edge && x < edge) out.breakpoints.push_back(x);
  return out;
}

}  // namespace irrsde
