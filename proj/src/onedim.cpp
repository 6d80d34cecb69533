#include "gascert/onedim.hpp"

#include <algorithm>
#include <cmath>

#include "gascert/parallel.hpp"

namespace gascert {

namespace {

constexpr double kBand = 1e-6;

void push_witness(CheckResult& r, double x) {
  r.pass = false;
  ++r.violations;
  if (r.witnesses.size() < 10) r.witnesses.push_back(x);
}

// Sign-change roots of h on a uniform grid of `cells` cells over [lo, hi].
std::vector<double> scan_roots(const std::function<std::optional<double>(double)>& h, double lo,
                               double hi, int cells) {
  std::vector<double> xs(static_cast<std::size_t>(cells) + 1);
  std::vector<std::optional<double>> hs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = i == xs.size() - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / cells;
  parallel_for(xs.size(), [&](std::size_t i) { hs[i] = h(xs[i]); });
  std::vector<double> roots;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (hs[i] && *hs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (i + 1 == xs.size() || !hs[i] || !hs[i + 1] || *hs[i + 1] == 0.0) continue;
    if ((*hs[i] < 0) == (*hs[i + 1] < 0)) continue;
    double a = xs[i], b = xs[i + 1], fa = *hs[i];
    while (b - a > 1e-12) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      auto fm = h(mid);
      if (!fm) break;
      if (*fm == 0.0) {
        a = b = mid;
        break;
      }
      if ((*fm < 0) == (fa < 0)) {
        a = mid;
        fa = *fm;
      } else {
        b = mid;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

}  // namespace

Expression mobius_phi(double b, double c) {
  const Expression t = Expression::variable(1);
  if (c == 0.0 && b == 1.0) return t;
  return (Expression::constant(c - b + 1.0) + Expression::constant(b) * t) /
         (Expression::constant(1.0) + Expression::constant(c) * t);
}

Expression canonical_phi1(double a) {
  const Expression t = Expression::variable(1);
  return Expression::constant(a) * (Expression::constant(1.0) + t) /
         (Expression::constant(1.0) + Expression::constant(2.0 * a - 1.0) * t);
}

Expression canonical_phi2(double a) {
  const Expression t = Expression::variable(1);
  return Expression::constant(a + 1.0) / (Expression::constant(a) * t + Expression::constant(1.0));
}

Expression self_inverse_mobius(double a) {
  const Expression t = Expression::variable(1);
  return (Expression::constant(1.0) - Expression::constant(a) * t) /
         (Expression::constant(a) - Expression::constant(2.0 * a - 1.0) * t);
}

OneDimMap OneDimMap::from_expression(Expression g, double lo, double hi, double fixed_point) {
  if (g.arity() > 1) throw Error("one-dimensional map may only use u1");
  OneDimMap m;
  m.expr_ = std::move(g);
  m.lo = lo;
  m.hi = hi;
  m.fixed_point = fixed_point;
  return m;
}

OneDimMap OneDimMap::from_function(Fn f, Fn df, double lo, double hi, double fixed_point,
                                   std::string description) {
  OneDimMap m;
  m.f_ = std::move(f);
  m.df_ = std::move(df);
  m.lo = lo;
  m.hi = hi;
  m.fixed_point = fixed_point;
  m.description_ = std::move(description);
  return m;
}

double OneDimMap::operator()(double x) const {
  if (expr_) return expr_->eval({x});
  if (!f_) throw Error("empty one-dimensional map");
  const double v = f_(x);
  if (!std::isfinite(v)) throw DomainError(describe(), x, "non-finite result");
  return v;
}

std::optional<double> OneDimMap::try_eval(double x) const noexcept {
  try {
    return (*this)(x);
  } catch (...) {
    return std::nullopt;
  }
}

double OneDimMap::derivative(double x, bool* non_differentiable) const {
  if (expr_) {
    DualVector d = expr_->eval_dual({x});
    if (non_differentiable) *non_differentiable = d.non_differentiable;
    return d.partials[0];
  }
  if (!df_) throw Error("one-dimensional map has no derivative");
  if (non_differentiable) *non_differentiable = false;
  return df_(x);
}

std::string OneDimMap::describe() const { return expr_ ? expr_->to_string() : description_; }

MobiusParams calibrate_mobius(const GradientVector& v, const std::vector<double>& B,
                              const std::vector<double>& c) {
  if (B.size() != v.a.size() || c.size() != v.a.size())
    throw Error("calibrate_mobius: gradient, B and c must have equal length");
  MobiusParams p;
  p.c = c;
  p.b.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(c[j] > 0)) throw Error("calibrate_mobius: c_j must be positive");
    p.b[j] = v.a[j] >= 0 ? c[j] - (1.0 + c[j]) * B[j] : c[j] + (1.0 + c[j]) * B[j];
  }
  return p;
}

MobiusParams calibrate_mobius(const GradientVector& v, const std::vector<double>& B) {
  return calibrate_mobius(v, B, std::vector<double>(v.a.size(), 1.0));
}

MobiusParams calibrate_mobius_eps(const GradientVector& v, const std::vector<double>& c, double eps) {
  if (c.size() != v.a.size()) throw Error("calibrate_mobius: gradient and c must have equal length");
  MobiusParams p;
  p.c = c;
  p.b.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(c[j] > 0)) throw Error("calibrate_mobius: c_j must be positive");
    p.b[j] = v.a[j] >= 0 ? c[j] - eps : c[j] + eps;
  }
  return p;
}

OneDimMap compose_g(const NormalizedMap& fm, const std::vector<Expression>& phis) {
  if (static_cast<int>(phis.size()) != fm.k) throw Error("compose_g: need one phi per argument");
  Expression g = fm.f0.substitute(phis);
  const double g1 = g.eval({1.0});
  if (std::fabs(g1 - 1.0) > 1e-10) throw Error("compose_g: g(1) = " + std::to_string(g1));
  return OneDimMap::from_expression(std::move(g), fm.lo, fm.hi, 1.0);
}

OneDimMap compose_g(const NormalizedMap& fm, const MobiusParams& p) {
  if (static_cast<int>(p.b.size()) != fm.k || p.c.size() != p.b.size())
    throw Error("compose_g: Mobius parameters do not match k");
  std::vector<Expression> phis;
  for (std::size_t j = 0; j < p.b.size(); ++j) {
    if (p.c[j] < 0) throw Error("compose_g: c_j must be non-negative");
    if (1.0 + p.c[j] * fm.lo <= 0.0) throw Error("compose_g: Mobius denominator vanishes in the domain");
    phis.push_back(mobius_phi(p.b[j], p.c[j]));
  }
  return compose_g(fm, phis);
}

OneDimMap diagonal_map(const NormalizedMap& fm) {
  return compose_g(fm, std::vector<Expression>(static_cast<std::size_t>(fm.k), Expression::variable(1)));
}

double g_prime_at_fixed_point(const OneDimMap& g) {
  bool nd = false;
  const double d = g.derivative(g.fixed_point, &nd);
  if (nd) throw Error("g is not differentiable at its fixed point");
  return d;
}

CheckResult negative_feedback_check(const OneDimMap& g, int grid_n) {
  if (grid_n < 100) throw Error("negative_feedback_check: grid_n must be at least 100");
  CheckResult r;
  for (int i = 0; i < grid_n; ++i) {
    const double t = g.lo + (g.hi - g.lo) * i / (grid_n - 1);
    if (std::fabs(t - g.fixed_point) < kBand) continue;
    ++r.samples;
    auto v = g.try_eval(t);
    if (!v || !((*v - t) * (t - g.fixed_point) < 0)) push_witness(r, t);
  }
  return r;
}

TwoCycleReport find_two_cycles(const OneDimMap& g, int grid_n) {
  TwoCycleReport rep;
  rep.scan_resolution = grid_n;
  const double fp = g.fixed_point;
  auto h = [&g](double x) -> std::optional<double> {
    auto y = g.try_eval(x);
    if (!y) return std::nullopt;
    auto z = g.try_eval(*y);
    if (!z) return std::nullopt;
    return *z - x;
  };

  std::vector<std::optional<double>> hs(static_cast<std::size_t>(grid_n) + 1);
  parallel_for(hs.size(), [&](std::size_t i) { hs[i] = h(g.lo + (g.hi - g.lo) * static_cast<double>(i) / grid_n); });
  std::size_t valid = 0, near = 0;
  rep.min_abs_h = INFINITY;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = g.lo + (g.hi - g.lo) * static_cast<double>(i) / grid_n;
    if (!hs[i] || std::fabs(x - fp) <= kBand) continue;
    ++valid;
    const double a = std::fabs(*hs[i]);
    rep.min_abs_h = std::min(rep.min_abs_h, a);
    if (a <= 1e-9 * std::max(1.0, std::fabs(x))) ++near;
  }
  rep.near_root_fraction = valid ? static_cast<double>(near) / static_cast<double>(valid) : 0.0;
  if (rep.near_root_fraction > 0.1) {
    rep.continuum = true;
    return rep;
  }

  for (double p : scan_roots(h, g.lo, g.hi, grid_n)) {
    if (std::fabs(p - fp) <= kBand) continue;
    auto q = g.try_eval(p);
    if (!q) continue;
    auto back = g.try_eval(*q);
    if (!back) continue;
    const double res = std::fabs(*back - p);
    if (res >= 1e-9 || std::fabs(p - *q) <= kBand) continue;
    const double lo = std::min(p, *q), hi = std::max(p, *q);
    bool dup = std::any_of(rep.cycles.begin(), rep.cycles.end(), [&](const auto& c) {
      return std::fabs(c.first - lo) < 1e-7 * std::max(1.0, lo) &&
             std::fabs(c.second - hi) < 1e-7 * std::max(1.0, hi);
    });
    if (dup) continue;
    rep.cycles.emplace_back(lo, hi);
    rep.residual_bound = std::max(rep.residual_bound, res);
  }
  std::sort(rep.cycles.begin(), rep.cycles.end());
  return rep;
}

std::vector<double> fixed_points_1d(const OneDimMap& g, int cells) {
  auto r = [&g](double x) -> std::optional<double> {
    auto v = g.try_eval(x);
    if (!v) return std::nullopt;
    return *v - x;
  };
  const double edge = 1e-9 * std::max(1.0, g.hi - g.lo);
  std::vector<double> out;
  for (double x : scan_roots(r, g.lo, g.hi, cells)) {
    if (x - g.lo <= edge || g.hi - x <= edge) continue;
    if (!out.empty() && std::fabs(out.back() - x) < 1e-9 * std::max(1.0, std::fabs(x))) continue;
    out.push_back(x);
  }
  return out;
}

Gas1dVerdict gas_1d(const OneDimMap& g, int grid_n) {
  Gas1dVerdict v;
  v.fixed_points = fixed_points_1d(g);
  v.unique_fixed_point = v.fixed_points.size() == 1 && std::fabs(v.fixed_points[0] - g.fixed_point) < 1e-8;
  try {
    v.g_prime = g_prime_at_fixed_point(g);
    v.locally_stable = std::fabs(v.g_prime) < 1.0;
  } catch (const Error&) {
    v.locally_stable = false;
  }
  v.cycles = find_two_cycles(g, grid_n);
  v.gas = v.unique_fixed_point && v.locally_stable && v.cycles.none();
  return v;
}

SelfInverseReport self_inverse_envelope_check(const OneDimMap& f, const OneDimMap& g, int grid_n) {
  SelfInverseReport r;
  const double fp = f.fixed_point;
  for (int i = 0; i < grid_n; ++i) {
    const double x = f.lo + (f.hi - f.lo) * i / (grid_n - 1);
    auto gx = g.try_eval(x);
    auto ggx = gx ? g.try_eval(*gx) : std::nullopt;
    ++r.self_inverse_check.samples;
    if (!ggx || std::fabs(*ggx - x) > 1e-8 * std::max(1.0, std::fabs(x)))
      push_witness(r.self_inverse_check, x);
    if (std::fabs(x - fp) < kBand) continue;
    ++r.separation_check.samples;
    auto fx = f.try_eval(x);
    const bool ok = gx && fx && (x < fp ? *gx > *fx : *gx < *fx);
    if (!ok) push_witness(r.separation_check, x);
  }
  r.self_inverse = r.self_inverse_check.pass;
  r.separation = r.separation_check.pass;
  r.pass = r.self_inverse && r.separation;
  return r;
}

}  // namespace gascert
