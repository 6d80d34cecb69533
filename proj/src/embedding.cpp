#include "gascert/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gascert/parallel.hpp"

namespace gascert {

Box grid_box(const NormalizedMap& nm) {
  Box b;
  b.lo = nm.lo >= 0.0 ? std::max(nm.lo, 1e-3) : nm.lo;
  b.hi = std::min(nm.hi, 10.0);
  if (!(b.lo < b.hi)) throw Error("empty grid box");
  return b;
}

std::string to_string(Monotone m) {
  switch (m) {
    case Monotone::Increasing: return "increasing";
    case Monotone::Decreasing: return "decreasing";
    case Monotone::Mixed: return "mixed";
  }
  return "";
}

bool MonotonicityProfile::has_mixed() const {
  return std::any_of(args.begin(), args.end(), [](const auto& a) { return a.sign == Monotone::Mixed; });
}

bool MonotonicityProfile::is(std::initializer_list<Monotone> signs) const {
  if (signs.size() != args.size()) return false;
  std::size_t i = 0;
  for (Monotone s : signs)
    if (args[i++].sign != s) return false;
  return true;
}

std::string MonotonicityProfile::tag() const {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + to_string(args[i].sign);
  return s + ")";
}

namespace {

double grid_at(const Box& b, int n, int i) {
  return i == n - 1 ? b.hi : b.lo + (b.hi - b.lo) * i / (n - 1);
}

void require_k2(const NormalizedMap& f, const char* what) {
  if (f.k != 2) throw Error(std::string(what) + " is implemented for k = 2 only");
}

// Low-discrepancy points in [0,1)^k for k > 2 profiles.
double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

MonotonicityProfile monotonicity_profile(const NormalizedMap& f, int grid_n) {
  if (grid_n < 32) throw Error("monotonicity_profile: grid_n must be at least 32");
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const Box box = grid_box(f);
  const int k = f.k;
  const std::size_t n = static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n);
  std::vector<std::vector<double>> partials(n);
  parallel_for(n, [&](std::size_t idx) {
    std::vector<double> pt(static_cast<std::size_t>(k));
    if (k == 1) {
      pt[0] = box.lo + (box.hi - box.lo) * static_cast<double>(idx) / static_cast<double>(n - 1);
    } else if (k == 2) {
      pt[0] = grid_at(box, grid_n, static_cast<int>(idx % grid_n));
      pt[1] = grid_at(box, grid_n, static_cast<int>(idx / grid_n));
    } else {
      for (int i = 0; i < k; ++i)
        pt[i] = box.lo + (box.hi - box.lo) * radical_inverse(idx + 1, primes[i % 12]);
    }
    partials[idx] = f.f0.eval_dual(pt).partials;
  }, 64);
  MonotonicityProfile prof;
  prof.grid_n = grid_n;
  for (int i = 0; i < k; ++i) {
    ArgMonotonicity a;
    a.min_partial = INFINITY;
    a.max_partial = -INFINITY;
    for (const auto& p : partials) {
      a.min_partial = std::min(a.min_partial, p[i]);
      a.max_partial = std::max(a.max_partial, p[i]);
    }
    if (a.min_partial >= -1e-10 && a.max_partial > 0)
      a.sign = Monotone::Increasing;
    else if (a.max_partial <= 1e-10 && a.min_partial < 0)
      a.sign = Monotone::Decreasing;
    else
      a.sign = Monotone::Mixed;
    prof.args.push_back(a);
  }
  return prof;
}

std::pair<std::vector<double>, std::vector<double>> tau_points(const MonotonicityProfile& profile,
                                                               double x, double y) {
  if (x > y) throw Error("tau_points: requires x <= y");
  std::vector<double> p, pt;
  for (const auto& a : profile.args) {
    if (a.sign == Monotone::Mixed) throw Error("tau_points: argument with mixed monotonicity");
    const bool inc = a.sign == Monotone::Increasing;
    p.push_back(inc ? x : y);
    pt.push_back(inc ? y : x);
  }
  return {p, pt};
}

namespace {

struct PseudoSystem {
  const NormalizedMap& f;
  std::vector<bool> inc;

  std::vector<double> corner(double x, double y, bool transposed) const {
    std::vector<double> p(inc.size());
    for (std::size_t i = 0; i < inc.size(); ++i) p[i] = (inc[i] != transposed) ? x : y;
    return p;
  }

  std::optional<std::pair<double, double>> residual(double x, double y) const {
    auto a = f.f0.try_eval(corner(x, y, false));
    auto b = f.f0.try_eval(corner(x, y, true));
    if (!a || !b) return std::nullopt;
    return std::make_pair(*a - x, *b - y);
  }

  // Backtracking Newton, step halved until the residual norm decreases.
  std::optional<std::pair<double, double>> newton(double x, double y) const {
    auto r = residual(x, y);
    if (!r) return std::nullopt;
    for (int it = 0; it < 100; ++it) {
      const double norm = std::hypot(r->first, r->second);
      if (norm < 1e-13) return std::make_pair(x, y);
      DualVector da, db;
      try {
        da = f.f0.eval_dual(corner(x, y, false));
        db = f.f0.eval_dual(corner(x, y, true));
      } catch (const Error&) {
        return std::nullopt;
      }
      double ax = 0, ay = 0, bx = 0, by = 0;
      for (std::size_t i = 0; i < inc.size(); ++i) {
        (inc[i] ? ax : ay) += da.partials[i];
        (inc[i] ? by : bx) += db.partials[i];
      }
      const double j11 = ax - 1.0, j12 = ay, j21 = bx, j22 = by - 1.0;
      const double det = j11 * j22 - j12 * j21;
      if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
      const double dx = (r->first * j22 - r->second * j12) / det;
      const double dy = (j11 * r->second - j21 * r->first) / det;
      double t = 1.0;
      bool moved = false;
      for (int h = 0; h < 40; ++h, t *= 0.5) {
        auto rn = residual(x - t * dx, y - t * dy);
        if (rn && std::hypot(rn->first, rn->second) < norm) {
          x -= t * dx;
          y -= t * dy;
          r = rn;
          moved = true;
          break;
        }
      }
      if (!moved) return norm < 1e-10 ? std::optional(std::make_pair(x, y)) : std::nullopt;
    }
    return std::hypot(r->first, r->second) < 1e-10 ? std::optional(std::make_pair(x, y)) : std::nullopt;
  }
};

void add_point(std::vector<PseudoFixedPoint>& pts, PseudoFixedPoint p) {
  if (p.x > p.y) std::swap(p.x, p.y);
  for (const auto& q : pts)
    if (std::fabs(q.x - p.x) < 1e-7 * std::max(1.0, p.x) && std::fabs(q.y - p.y) < 1e-7 * std::max(1.0, p.y))
      return;
  pts.push_back(p);
}

}  // namespace

PseudoFixedReport pseudo_fixed_points(const NormalizedMap& f, const MonotonicityProfile& profile,
                                      int grid_n) {
  require_k2(f, "pseudo_fixed_points");
  if (profile.has_mixed()) throw Error("pseudo_fixed_points: argument with mixed monotonicity");
  PseudoFixedReport rep;
  rep.grid_n = grid_n;
  PseudoSystem sys{f, {}};
  for (const auto& a : profile.args) sys.inc.push_back(a.sign == Monotone::Increasing);

  const Box box = grid_box(f);
  const int nodes = grid_n + 1;
  std::vector<std::optional<std::pair<double, double>>> g(static_cast<std::size_t>(nodes * nodes));
  auto node = [&](int i) { return grid_at(box, nodes, i); };
  parallel_for(g.size(), [&](std::size_t idx) {
    g[idx] = sys.residual(node(static_cast<int>(idx % nodes)), node(static_cast<int>(idx / nodes)));
  }, 64);

  auto accept = [&](double x, double y) -> std::optional<PseudoFixedPoint> {
    auto r = sys.residual(x, y);
    if (!r) return std::nullopt;
    PseudoFixedPoint p{x, y, std::max(std::fabs(r->first), std::fabs(r->second))};
    if (p.residual >= 1e-9 || std::fabs(x - y) <= 1e-6) return std::nullopt;
    const double slack = 1e-9 * (box.hi - box.lo);
    if (std::min(x, y) < box.lo - slack || std::max(x, y) > box.hi + slack) return std::nullopt;
    return p;
  };

  for (int j = 0; j < grid_n; ++j) {
    for (int i = 0; i < grid_n; ++i) {
      bool s1n = false, s1p = false, s2n = false, s2p = false, ok = true;
      for (int c = 0; c < 4; ++c) {
        const auto& v = g[static_cast<std::size_t>((j + c / 2) * nodes + i + c % 2)];
        if (!v) {
          ok = false;
          break;
        }
        s1n |= v->first <= 0;
        s1p |= v->first >= 0;
        s2n |= v->second <= 0;
        s2p |= v->second >= 0;
      }
      if (!ok || !(s1n && s1p && s2n && s2p)) continue;
      const double cx = 0.5 * (node(i) + node(i + 1));
      const double cy = 0.5 * (node(j) + node(j + 1));
      auto sol = sys.newton(cx, cy);
      if (!sol) {
        rep.failed_cells.emplace_back(cx, cy);
        continue;
      }
      if (auto p = accept(sol->first, sol->second)) add_point(rep.points, *p);
    }
  }

  if (profile.is({Monotone::Decreasing, Monotone::Decreasing})) {
    rep.used_diagonal_shortcut = true;
    OneDimMap diag = diagonal_map(f);
    diag.lo = box.lo;
    diag.hi = box.hi;
    rep.diagonal_cycles = find_two_cycles(diag);
    for (const auto& [p, q] : rep.diagonal_cycles.cycles)
      if (auto pt = accept(p, q)) add_point(rep.points, *pt);
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const auto& a, const auto& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  return rep;
}

OmegaReport embedding_region_omega(const NormalizedMap& f, const MonotonicityProfile& profile,
                                   int grid_n) {
  require_k2(f, "embedding_region_omega");
  if (profile.has_mixed()) throw Error("embedding_region_omega: argument with mixed monotonicity");
  const Box box = grid_box(f);
  OmegaReport rep;
  rep.grid_n = grid_n;
  std::vector<std::pair<int, int>> cells;
  for (int j = 0; j < grid_n; ++j)
    for (int i = 0; i < j; ++i) cells.emplace_back(i, j);
  rep.points.resize(cells.size());
  parallel_for(cells.size(), [&](std::size_t idx) {
    const double x = grid_at(box, grid_n, cells[idx].first);
    const double y = grid_at(box, grid_n, cells[idx].second);
    auto [p, pt] = tau_points(profile, x, y);
    auto a = f.f0.try_eval(p);
    auto b = f.f0.try_eval(pt);
    rep.points[idx] = {x, y, a && b && x < *a && y > *b};
  });
  for (const auto& p : rep.points) rep.count += p.in_omega;
  rep.empty = rep.count == 0;
  return rep;
}

EmbeddingVerdict embedding_gas_verdict(const NormalizedMap& f, const MonotonicityProfile& profile,
                                       std::uint64_t seed, int boxes, int omega_grid) {
  require_k2(f, "embedding_gas_verdict");
  EmbeddingVerdict v;
  v.seed = seed;
  v.verdict = "Inconclusive";
  const Box box = grid_box(f);
  OneDimMap diag = diagonal_map(f);
  diag.lo = box.lo;
  diag.hi = box.hi;
  v.fixed_points = fixed_points_1d(diag);
  v.unique_fixed_point = v.fixed_points.size() == 1 && std::fabs(v.fixed_points[0] - 1.0) < 1e-8;
  if (!v.unique_fixed_point) {
    v.failing_clause = "fixed point not unique on the scan";
    return v;
  }
  if (profile.has_mixed()) {
    v.failing_clause = "mixed monotonicity";
    return v;
  }
  v.pseudo = pseudo_fixed_points(f, profile);
  if (!v.pseudo.points.empty()) {
    v.failing_clause = "pseudo-fixed points exist";
    return v;
  }
  const OmegaReport omega = embedding_region_omega(f, profile, omega_grid);
  v.omega_count = omega.count;
  v.omega_empty = omega.empty;
  if (omega.empty) {
    v.failing_clause = "region Omega is empty";
    return v;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : omega.points)
    if (p.in_omega) pts.emplace_back(p.x, p.y);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(box.lo, box.hi);
  v.boxes_tested = boxes;
  for (int b = 0; b < boxes; ++b) {
    std::vector<double> x0(static_cast<std::size_t>(f.k));
    for (auto& x : x0) x = u(rng);
    const double mn = *std::min_element(x0.begin(), x0.end());
    const double mx = *std::max_element(x0.begin(), x0.end());
    const bool ok = std::any_of(pts.begin(), pts.end(),
                                [&](const auto& p) { return p.first <= mn && p.second >= mx; });
    v.boxes_bracketed += ok;
  }
  if (v.boxes_bracketed < v.boxes_tested) {
    v.failing_clause = "some sampled initial conditions are not bracketed by an Omega point";
    return v;
  }
  v.certified = true;
  v.verdict = "GAS-embedding-certified";
  return v;
}

}  // namespace gascert
