#include "gascert/envelope2d.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "gascert/parallel.hpp"

namespace gascert {

namespace {

constexpr double kMargin = 1e-12;
constexpr double kBand = 1e-6;

double grid_at(const Box& b, int n, int i) {
  return i == n - 1 ? b.hi : b.lo + (b.hi - b.lo) * i / (n - 1);
}

void add_witness(CheckOutcome& c, Witness w) {
  c.pass = false;
  ++c.violations;
  if (c.witnesses.size() < 10) c.witnesses.push_back(std::move(w));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string to_string(RegionLabel l) {
  switch (l) {
    case RegionLabel::R: return "R";
    case RegionLabel::R1: return "R1";
    case RegionLabel::R2: return "R2";
    case RegionLabel::R3: return "R3";
    case RegionLabel::R4: return "R4";
    case RegionLabel::Boundary: return "boundary";
    case RegionLabel::FixedPointBand: return "fixed-point-band";
  }
  return "";
}

Slopes slopes_M1_M2(double a1, double a2) {
  Slopes s;
  s.M1_undefined = a2 == 1.0;
  s.M2_undefined = a2 == 0.0;
  s.M1 = s.M1_undefined ? INFINITY : a1 / (1.0 - a2);
  s.M2 = s.M2_undefined ? INFINITY : (1.0 - a1) / a2;
  s.slas = std::fabs(a1) + std::fabs(a2) < 1.0;
  if (s.slas) s.ordering_holds = std::fabs(s.M1) < 1.0 && (s.M2_undefined || std::fabs(s.M2) > 1.0);
  return s;
}

RegionLabel classify_value(double x, double y, double value) {
  if (std::hypot(x - 1.0, y - 1.0) <= kBand) return RegionLabel::FixedPointBand;
  const double lo = std::min(x, y), hi = std::max(x, y);
  if (value > lo + kMargin && value < hi - kMargin) return RegionLabel::R;
  if (y >= x) {
    if (value < x - kMargin) return RegionLabel::R2;
    if (value > y + kMargin) return RegionLabel::R3;
  } else {
    if (value < y - kMargin) return RegionLabel::R1;
    if (value > x + kMargin) return RegionLabel::R4;
  }
  return RegionLabel::Boundary;
}

RegionSample classify_point(const NormalizedMap& fj, double x, double y) {
  if (fj.k != 2) throw Error("regions are defined for k = 2 only");
  RegionSample s{x, y, fj.f0.eval({x, y}), RegionLabel::Boundary};
  s.label = classify_value(x, y, s.value);
  return s;
}

std::vector<RegionSample> region_grid(const NormalizedMap& fj, int n) {
  if (n < 16) throw Error("region_grid: n must be at least 16");
  if (fj.k != 2) throw Error("regions are defined for k = 2 only");
  const Box box = grid_box(fj);
  std::vector<RegionSample> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  parallel_for(out.size(), [&](std::size_t idx) {
    const double x = grid_at(box, n, static_cast<int>(idx % n));
    const double y = grid_at(box, n, static_cast<int>(idx / n));
    out[idx] = classify_point(fj, x, y);
  });
  return out;
}

namespace {

std::vector<double> roots_along(const std::function<std::optional<double>(double)>& h, const Box& box,
                                int cells) {
  std::vector<double> roots;
  double px = box.lo;
  auto pv = h(px);
  for (int i = 1; i <= cells; ++i) {
    const double x = i == cells ? box.hi : box.lo + (box.hi - box.lo) * i / cells;
    auto v = h(x);
    if (pv && *pv == 0.0) roots.push_back(px);
    if (pv && v && *pv != 0.0 && *v != 0.0 && (*pv < 0) != (*v < 0)) {
      double a = px, b = x, fa = *pv;
      for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        auto fm = h(m);
        if (!fm) break;
        if ((*fm < 0) == (fa < 0)) {
          a = m;
          fa = *fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    px = x;
    pv = v;
  }
  if (pv && *pv == 0.0) roots.push_back(px);
  return roots;
}

}  // namespace

std::vector<CurvePoint> trace_curve_y_eq_F(const NormalizedMap& fj, int n) {
  if (fj.k != 2) throw Error("curves are defined for k = 2 only");
  const Box box = grid_box(fj);
  std::vector<std::vector<CurvePoint>> cols(static_cast<std::size_t>(n));
  parallel_for(cols.size(), [&](std::size_t i) {
    const double x = grid_at(box, n, static_cast<int>(i));
    auto h = [&](double y) -> std::optional<double> {
      auto v = fj.f0.try_eval({x, y});
      if (!v) return std::nullopt;
      return *v - y;
    };
    for (double y : roots_along(h, box, n)) cols[i].push_back({x, y});
  }, 8);
  std::vector<CurvePoint> out;
  for (auto& c : cols) out.insert(out.end(), c.begin(), c.end());
  return out;
}

std::vector<CurvePoint> trace_curve_x_eq_F(const NormalizedMap& fj, int n) {
  if (fj.k != 2) throw Error("curves are defined for k = 2 only");
  const Box box = grid_box(fj);
  std::vector<std::vector<CurvePoint>> rows(static_cast<std::size_t>(n));
  parallel_for(rows.size(), [&](std::size_t j) {
    const double y = grid_at(box, n, static_cast<int>(j));
    auto h = [&](double x) -> std::optional<double> {
      auto v = fj.f0.try_eval({x, y});
      if (!v) return std::nullopt;
      return *v - x;
    };
    for (double x : roots_along(h, box, n)) rows[j].push_back({x, y});
  }, 8);
  std::vector<CurvePoint> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<double> cp_shift(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> s(static_cast<std::size_t>(k));
  for (auto& v : s) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return s;
}

std::vector<double> halton_point(std::size_t index, int k, const std::vector<double>& shift, const Box& box) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<double> p(static_cast<std::size_t>(k));
  for (int d = 0; d < k; ++d) {
    const unsigned base = primes[d % 16];
    double inv = 1.0 / base, f = inv, r = 0.0;
    for (std::size_t i = index + 1; i > 0; i /= base) {
      r += f * static_cast<double>(i % base);
      f *= inv;
    }
    r += shift[static_cast<std::size_t>(d)];
    r -= std::floor(r);
    p[static_cast<std::size_t>(d)] = box.lo + (box.hi - box.lo) * r;
  }
  return p;
}

MonotoneCheck check_decreasing(const OneDimMap& g, const Box& box, int grid_n) {
  MonotoneCheck mc;
  std::optional<double> prev;
  bool strict_somewhere = false;
  for (int i = 0; i < grid_n; ++i) {
    const double x = grid_at(box, grid_n, i);
    auto v = g.try_eval(x);
    if (!v) {
      mc.witness = x;
      return mc;
    }
    if (prev) {
      const double tol = 1e-14 * std::max(1.0, std::fabs(*prev));
      if (*v > *prev + tol) {
        mc.witness = x;
        return mc;
      }
      if (std::fabs(*v - *prev) <= tol)
        mc.flat_tail = true;
      else
        strict_somewhere = true;
    }
    prev = v;
  }
  mc.decreasing = strict_somewhere;
  return mc;
}

EnvelopeReport check_definition_envelope(const NormalizedMap& f, const OneDimMap& g, const Sampler& sampler) {
  EnvelopeReport rep;
  rep.box = sampler.box ? *sampler.box : grid_box(f);
  rep.sampler_n = sampler.n;
  rep.seed = sampler.seed;
  rep.g_text = g.describe();
  rep.theorem_route = "Definition";
  CheckOutcome& c = rep.definition_check;
  c.ran = true;
  c.pass = true;

  const MonotoneCheck mc = check_decreasing(g, rep.box);
  rep.g_decreasing = mc.decreasing;
  rep.g_flat_tail = mc.flat_tail;
  if (!mc.decreasing) {
    c.pass = false;
    c.note = "g is not decreasing on the sample box";
    if (mc.witness) c.witnesses.push_back({{*mc.witness}, 0.0, "g increases"});
    return rep;
  }
  if (mc.flat_tail) c.note = "g is non-increasing with flat parts";
  auto g1 = g.try_eval(1.0);
  if (!g1 || std::fabs(*g1 - 1.0) > 1e-10) {
    c.pass = false;
    c.note = "g(1) != 1";
    return rep;
  }

  const int k = f.k;
  const auto shift = cp_shift(k, sampler.seed);
  // 0 ok, 1 F undefined, 2 low exit violated, 3 high exit violated, 4 g undefined
  std::vector<std::uint8_t> status(sampler.n, 0);
  std::vector<double> zs(sampler.n, 0.0);
  parallel_for(sampler.n, [&](std::size_t i) {
    const auto pt = halton_point(i, k, shift, rep.box);
    auto z = f.f0.try_eval(pt);
    if (!z) {
      status[i] = 1;
      return;
    }
    zs[i] = *z;
    const double a = *std::min_element(pt.begin(), pt.end());
    const double b = *std::max_element(pt.begin(), pt.end());
    if (a < *z && *z < b) return;
    if (*z <= 0.5 * (a + b)) {
      auto gb = g.try_eval(b);
      if (!gb) status[i] = 4;
      else if (!(*gb < *z + kMargin)) status[i] = 2;
    } else {
      auto ga = g.try_eval(a);
      if (!ga) status[i] = 4;
      else if (!(*ga > *z - kMargin)) status[i] = 3;
    }
  });
  static const char* what[] = {"", "F undefined", "g(max) >= z <= min", "g(min) <= z >= max",
                               "g undefined"};
  c.samples = sampler.n;
  for (std::size_t i = 0; i < sampler.n; ++i)
    if (status[i]) add_witness(c, {halton_point(i, k, shift, rep.box), zs[i], what[status[i]]});
  return rep;
}

EnvelopeReport check_envelope_via_R(const NormalizedMap& fj, const OneDimMap& g, int grid_n) {
  if (fj.k != 2) throw Error("check_envelope_via_R needs k = 2");
  const Box box = grid_box(fj);
  {
    const int n = 64;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = grid_at(box, n, i), y = grid_at(box, n, j);
        const double d = fj.f0.eval_dual({x, y}).partials[1];
        if (d < -1e-10)
          throw Error("check_envelope_via_R: F is not increasing in argument 2 at grid cell (" + fmt(x) +
                      ", " + fmt(y) + ")");
      }
  }
  EnvelopeReport rep;
  rep.box = box;
  rep.grid_n = grid_n;
  rep.g_text = g.describe();
  rep.theorem_route = "Th-MT1";
  const MonotoneCheck mc = check_decreasing(g, box);
  rep.g_decreasing = mc.decreasing;
  rep.g_flat_tail = mc.flat_tail;
  CheckOutcome& c = rep.region_check;
  c.ran = true;
  c.pass = true;
  if (!mc.decreasing) {
    c.pass = false;
    c.note = "g is not decreasing";
    return rep;
  }
  for (int i = 0; i < grid_n; ++i) {
    const double x = grid_at(box, grid_n, i);
    if (std::fabs(x - 1.0) <= kBand) continue;
    ++c.samples;
    auto gx = g.try_eval(x);
    std::optional<double> v = gx ? fj.f0.try_eval({x, *gx}) : std::nullopt;
    if (!v) {
      add_witness(c, {{x, gx.value_or(NAN)}, NAN, "undefined"});
      continue;
    }
    const double lo = std::min(x, *gx), hi = std::max(x, *gx);
    if (!(*v > lo + kMargin && *v < hi - kMargin))
      add_witness(c, {{x, *gx}, *v, to_string(classify_value(x, *gx, *v))});
  }
  return rep;
}

double absorbing_lower_bound(const NormalizedMap& f) {
  const Box box = grid_box(f);
  const int n = 64;
  double mn = INFINITY;
  std::vector<double> pt(static_cast<std::size_t>(f.k));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < f.k; ++d) pt[static_cast<std::size_t>(d)] = grid_at(box, n, d == 0 ? i : j);
      if (auto v = f.f0.try_eval(pt)) mn = std::min(mn, *v);
    }
  if (!std::isfinite(mn)) return box.lo;
  return std::max(box.lo, mn - 1e-3 * (1.0 + std::fabs(mn)));
}

namespace {

struct HermiteTable {
  std::vector<double> x, y, d;

  std::size_t interval(double t) const {
    if (!(t >= x.front() && t <= x.back())) throw DomainError("implicit phi", t, "outside tabulated range");
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    return i == 0 ? 0 : std::min(i - 1, x.size() - 2);
  }

  double value(double t) const {
    const std::size_t i = interval(t);
    const double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y[i] + (s3 - 2 * s2 + s) * h * d[i] + (-2 * s3 + 3 * s2) * y[i + 1] +
           (s3 - s2) * h * d[i + 1];
  }

  double slope(double t) const {
    const std::size_t i = interval(t);
    const double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * y[i] + (-6 * s2 + 6 * s) * y[i + 1]) / h + (3 * s2 - 4 * s + 1) * d[i] +
           (3 * s2 - 2 * s) * d[i + 1];
  }
};

}  // namespace

ImplicitPhi phi_from_implicit(const NormalizedMap& f, int knots) {
  if (f.k != 2) throw Error("phi_from_implicit needs k = 2");
  const MonotonicityProfile prof = monotonicity_profile(f, 64);
  if (!prof.is({Monotone::Increasing, Monotone::Decreasing}))
    throw Error("phi_from_implicit: map is " + prof.tag() + ", expected (increasing,decreasing)");
  const Box box = grid_box(f);
  const double lo = absorbing_lower_bound(f);
  std::vector<double> xs;
  for (int i = 0; i < knots; ++i) xs.push_back(i == knots - 1 ? box.hi : lo + (box.hi - lo) * i / (knots - 1));
  if (lo < 1.0 && 1.0 < box.hi && !std::binary_search(xs.begin(), xs.end(), 1.0)) {
    xs.insert(std::upper_bound(xs.begin(), xs.end(), 1.0), 1.0);
  }
  auto table = std::make_shared<HermiteTable>();
  table->x = xs;
  table->y.assign(xs.size(), 0.0);
  table->d.assign(xs.size(), 0.0);
  std::vector<std::string> errors(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const double x = xs[i];
    auto h = [&](double y) -> std::optional<double> {
      auto v = f.f0.try_eval({y, x});
      if (!v) return std::nullopt;
      return *v - y;
    };
    auto roots = roots_along(h, box, 512);
    if (roots.size() != 1) {
      errors[i] = (roots.empty() ? "no root" : "multiple roots") + std::string(" of y = F(y,x) at x = ") + fmt(x);
      return;
    }
    double y = roots[0];
    // One Newton polish on the bracketed root.
    const DualVector d = f.f0.eval_dual({y, x});
    if (d.partials[0] != 1.0) {
      const double yn = y - (d.value - y) / (d.partials[0] - 1.0);
      if (std::fabs(yn - y) < 1e-10) y = yn;
    }
    const DualVector dd = f.f0.eval_dual({y, x});
    table->y[i] = y;
    table->d[i] = dd.partials[1] / (1.0 - dd.partials[0]);
  }, 16);
  for (const auto& e : errors)
    if (!e.empty()) throw Error("phi_from_implicit: " + e);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(table->y[i + 1] < table->y[i])) throw Error("phi_from_implicit: tabulation is not decreasing");

  // Fritsch-Carlson limiter against overshoot.
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double delta = (table->y[i + 1] - table->y[i]) / (xs[i + 1] - xs[i]);
    double& d0 = table->d[i];
    double& d1 = table->d[i + 1];
    if (d0 > 0) d0 = 0;
    if (d1 > 0) d1 = 0;
    const double a = d0 / delta, b = d1 / delta;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      d0 = t * a * delta;
      d1 = t * b * delta;
    }
  }

  ImplicitPhi out;
  out.knots = xs;
  out.values = table->y;
  out.phi = OneDimMap::from_function([table](double t) { return table->value(t); },
                                     [table](double t) { return table->slope(t); }, xs.front(), xs.back(), 1.0,
                                     "phi solving y = F(y,x), tabulated");
  const double p1 = out.phi(1.0);
  if (std::fabs(p1 - 1.0) > 1e-8) throw Error("phi_from_implicit: phi(1) = " + fmt(p1));
  const DualVector g = f.f0.eval_dual({1.0, 1.0});
  out.slope_at_one = out.phi.derivative(1.0);
  out.expected_slope = g.partials[1] / (1.0 - g.partials[0]);
  if (std::fabs(std::fabs(out.slope_at_one) - std::fabs(out.expected_slope)) > 1e-4)
    throw Error("phi_from_implicit: |phi'(1)| disagrees with |a2/(1-a1)|");
  return out;
}

std::optional<double> phi_inverse(const OneDimMap& phi, double y) {
  auto top = phi.try_eval(phi.lo), bottom = phi.try_eval(phi.hi);
  if (!top || !bottom || y > *top || y < *bottom) return std::nullopt;
  double a = phi.lo, b = phi.hi;
  for (int i = 0; i < 200 && b - a > 1e-14 * std::max(1.0, a); ++i) {
    const double m = 0.5 * (a + b);
    if (phi(m) > y)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

OneDimMap g_from_phi(const NormalizedMap& f, const OneDimMap& phi) {
  auto fn = [f0 = f.f0, phi](double x) { return f0.eval({phi(x), x}); };
  auto dfn = [f0 = f.f0, phi](double x) {
    const DualVector d = f0.eval_dual({phi(x), x});
    return d.partials[0] * phi.derivative(x) + d.partials[1];
  };
  return OneDimMap::from_function(fn, dfn, phi.lo, phi.hi, 1.0, "F(phi(x), x)");
}

EnvelopeReport check_envelope_incr_decr(const NormalizedMap& f, const OneDimMap& phi, int grid_n,
                                        const Sampler& sampler) {
  if (f.k != 2) throw Error("check_envelope_incr_decr needs k = 2");
  auto p1 = phi.try_eval(1.0);
  if (!p1 || std::fabs(*p1 - 1.0) > 1e-8) throw Error("check_envelope_incr_decr: phi(1) != 1");
  const Box box{phi.lo, phi.hi};
  CheckOutcome pre;
  pre.ran = true;
  pre.pass = true;
  for (int i = 0; i < grid_n; ++i) {
    const double x = grid_at(box, grid_n, i);
    if (std::fabs(x - 1.0) <= kBand) continue;
    ++pre.samples;
    auto y = phi.try_eval(x);
    auto v = y ? f.f0.try_eval({x, *y}) : std::nullopt;
    if (!v) {
      add_witness(pre, {{x, y.value_or(NAN)}, NAN, "phi curve undefined"});
    } else if (classify_value(x, *y, *v) != RegionLabel::R) {
      add_witness(pre, {{x, *y}, *v, "phi curve " + to_string(classify_value(x, *y, *v))});
    }
    // The graph of phi^{-1} is the curve x = F(x,y), i.e. part of the boundary of R.
    if (auto yi = phi_inverse(phi, x)) {
      auto w = f.f0.try_eval({x, *yi});
      const RegionLabel l = w ? classify_value(x, *yi, *w) : RegionLabel::Boundary;
      const bool on_edge = w && std::fabs(*w - x) <= 1e-7 * std::max(1.0, std::fabs(x));
      if (!w || !(l == RegionLabel::R || l == RegionLabel::Boundary || on_edge))
        add_witness(pre, {{x, *yi}, w.value_or(NAN), "phi inverse curve " + to_string(l)});
    }
  }
  pre.note = "phi strictly inside R; phi inverse in the closure of R";
  EnvelopeReport rep;
  if (pre.pass) {
    Sampler s = sampler;
    s.box = box;
    rep = check_definition_envelope(f, g_from_phi(f, phi), s);
  } else {
    rep.box = box;
    rep.g_text = "F(phi(x), x)";
  }
  rep.precondition = pre;
  rep.grid_n = grid_n;
  rep.theorem_route = "Lem-IncrDecr";
  return rep;
}

namespace {

OneDimMap on_box(OneDimMap g, const Box& b) {
  g.lo = b.lo;
  g.hi = b.hi;
  return g;
}

Expression clipped_linear(double s) {
  const Expression t = Expression::variable(1);
  return max(Expression::constant(1.0 + s) - Expression::constant(s) * t, Expression::constant(0.0));
}

}  // namespace

Verdict gas_certificate(const NormalizedMap& f0, const CertificateOptions& opt) {
  Verdict v;
  v.slas = slas_index(f0, opt.m_max);
  v.evidence.push_back("linearization: " + v.slas.tag() + ", spectral radius " + fmt(v.slas.spectral_radius));
  switch (v.slas.classification) {
    case SlasClass::Unstable: v.verdict = "Unstable"; return v;
    case SlasClass::NonHyperbolic: v.verdict = "Inconclusive"; return v;
    case SlasClass::LASNotYetSLAS: v.verdict = "LAS-only"; return v;
    case SlasClass::SLAS: break;
  }
  v.verdict = "LAS-only";
  if (f0.k != 2) {
    v.evidence.push_back("global routes need k = 2");
    return v;
  }
  const Box box = grid_box(f0);
  {
    OneDimMap diag = on_box(diagonal_map(f0), box);
    v.fixed_points = fixed_points_1d(diag);
  }
  if (v.fixed_points.size() != 1) {
    v.evidence.push_back("fixed point is not unique on the scan");
    return v;
  }
  v.evidence.push_back("unique fixed point on the diagonal scan");

  const int s = *v.slas.slas_index;
  Sampler sampler;
  sampler.n = opt.samples;
  sampler.seed = opt.seed;

  for (int j = s; j <= s + opt.extra_expansions; ++j) {
    const NormalizedMap fj = expand(f0, j);
    const GradientVector gj = gradient(fj);
    if (gj.one_norm() >= 1.0) continue;
    const MonotonicityProfile prof = monotonicity_profile(fj, 64);
    v.evidence.push_back("F_" + std::to_string(j) + " monotonicity " + prof.tag());

    auto finish = [&](const std::string& route) {
      v.certified = true;
      v.verdict = "GAS-certified(grid)";
      v.route = route;
      v.expansion_used = j;
      v.profile = prof;
      v.slopes = slopes_M1_M2(gj.a[0], gj.a[1]);
    };

    if (prof.args[1].sign == Monotone::Increasing) {
      std::vector<std::pair<std::string, OneDimMap>> cands;
      try {
        const GradientVector g0 = gradient(f0);
        const MobiusParams mp = calibrate_mobius(g0, column_sums_B(CompanionMatrix{g0.a}, j));
        cands.emplace_back("mobius", compose_g(f0, mp));
      } catch (const Error&) {
      }
      for (double a : {1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 0.75, 0.5})
        cands.emplace_back("canonical-phi2", OneDimMap::from_expression(canonical_phi2(a), box.lo, box.hi));
      for (double a : {1.5, 2.0, 3.0, 5.0, 10.0})
        cands.emplace_back("canonical-phi1", OneDimMap::from_expression(canonical_phi1(a), box.lo, box.hi));
      cands.emplace_back("diagonal", diagonal_map(fj));
      for (double sl : {0.5, 0.75, 0.9, 0.95, 0.99})
        cands.emplace_back("clipped-linear", OneDimMap::from_expression(clipped_linear(sl), box.lo, box.hi));

      for (auto& [source, g0] : cands) {
        OneDimMap g = on_box(g0, box);
        CandidateAttempt at{source, g.describe(), j, ""};
        double gp = 0.0;
        try {
          gp = g_prime_at_fixed_point(g);
        } catch (const Error& e) {
          at.outcome = e.what();
          v.attempts.push_back(at);
          continue;
        }
        if (std::fabs(gp) >= 1.0) {
          at.outcome = "|g'(1)| >= 1";
          v.attempts.push_back(at);
          continue;
        }
        EnvelopeReport rep = check_envelope_via_R(fj, g, opt.grid_n);
        if (!rep.region_check.pass) {
          at.outcome = rep.g_decreasing ? "curve of g leaves R" : "g not decreasing";
          v.attempts.push_back(at);
          continue;
        }
        TwoCycleReport cyc = find_two_cycles(g);
        if (!cyc.none()) {
          at.outcome = "g has a 2-cycle";
          v.attempts.push_back(at);
          continue;
        }
        EnvelopeReport def = check_definition_envelope(fj, g, sampler);
        if (!def.definition_check.pass) {
          at.outcome = "definition check failed";
          v.attempts.push_back(at);
          continue;
        }
        at.outcome = "accepted";
        v.attempts.push_back(at);
        rep.definition_check = def.definition_check;
        rep.sampler_n = def.sampler_n;
        rep.seed = def.seed;
        finish("Th-MT1");
        v.envelope = rep;
        v.g_text = g.describe();
        v.g_source = source;
        v.g_prime = gp;
        v.g_cycles = cyc;
        v.evidence.push_back("g = " + v.g_text + " lies in R of F_" + std::to_string(j) + ", no 2-cycle");
        return v;
      }
    } else if (prof.is({Monotone::Increasing, Monotone::Decreasing})) {
      CandidateAttempt at{"implicit-phi", "phi from y = F(y,x)", j, ""};
      try {
        ImplicitPhi ip = phi_from_implicit(fj);
        EnvelopeReport rep = check_envelope_incr_decr(fj, ip.phi, opt.grid_n, sampler);
        if (!rep.precondition.pass) {
          at.outcome = "phi or phi inverse leaves R";
        } else if (!rep.definition_check.pass) {
          at.outcome = "definition check failed";
        } else {
          OneDimMap g = g_from_phi(fj, ip.phi);
          const double gp = g_prime_at_fixed_point(g);
          TwoCycleReport cyc = find_two_cycles(g);
          if (std::fabs(gp) >= 1.0) {
            at.outcome = "|g'(1)| >= 1";
          } else if (!cyc.none()) {
            at.outcome = "g has a 2-cycle";
          } else {
            at.outcome = "accepted";
            v.attempts.push_back(at);
            finish("Th-IncrDecr");
            v.envelope = rep;
            v.g_text = g.describe();
            v.g_source = "implicit-phi";
            v.g_prime = gp;
            v.g_cycles = cyc;
            v.evidence.push_back("g = F(phi(x),x) envelopes F_" + std::to_string(j) + ", no 2-cycle");
            return v;
          }
        }
      } catch (const Error& e) {
        at.outcome = e.what();
      }
      v.attempts.push_back(at);
    } else if (prof.is({Monotone::Decreasing, Monotone::Decreasing})) {
      CandidateAttempt at{"diagonal", "F(x,x)", j, ""};
      OneDimMap diag = on_box(diagonal_map(fj), box);
      TwoCycleReport cyc = find_two_cycles(diag);
      EmbeddingVerdict emb = embedding_gas_verdict(fj, prof, opt.seed);
      if (!cyc.none()) {
        at.outcome = "diagonal map has a 2-cycle";
      } else if (!emb.certified) {
        at.outcome = "embedding: " + emb.failing_clause;
      } else {
        at.outcome = "accepted";
        v.attempts.push_back(at);
        finish("DecDec-embedding");
        v.embedding = emb;
        v.g_text = diag.describe();
        v.g_source = "diagonal";
        v.g_prime = g_prime_at_fixed_point(diag);
        v.g_cycles = cyc;
        v.evidence.push_back("diagonal map has no 2-cycle, hence no pseudo-fixed points; embedding applies");
        return v;
      }
      v.attempts.push_back(at);
    } else {
      v.attempts.push_back({"none", "", j, "no route for monotonicity " + prof.tag()});
    }
  }
  v.evidence.push_back("no enveloping certificate found up to F_" + std::to_string(s + opt.extra_expansions));
  return v;
}

}  // namespace gascert
