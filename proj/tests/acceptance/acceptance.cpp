// One line per acceptance criterion: result, tolerance, runtime against its limit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "gascert/envelope2d.hpp"
#include "gascert/orbit.hpp"

using namespace gascert;

namespace {

NormalizedMap cat(const std::string& name, const ParamMap& p = {}) { return normalize(catalogue_entry(name, p)); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED: " << what << ";";
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    const bool ok = std::fabs(got - want) <= tol;
    if (!ok) {
      pass = false;
      detail << " FAILED: " << what << " got " << got << " want " << want << ";";
    }
  }
};

std::string dbl(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

Outcome c1() {
  Outcome o;
  const NormalizedMap f = cat("linear-neg");
  const SlasReport r = slas_index(f);
  o.near(r.norms[0], 1.2, 1e-12, "||V0||");
  o.near(r.norms[1], 0.6, 1e-12, "||V1||");
  o.expect(r.slas_index == 1, "slas_index 1");
  const GradientVector g = gradient(expand(f, 1));
  o.near(g.a[0], -6.0 / 25, 1e-12, "F1 a1");
  o.near(g.a[1], 9.0 / 25, 1e-12, "F1 a2");
  o.detail << " tol 1e-12";
  return o;
}

Outcome c2() {
  Outcome o;
  for (double b : {0.25, 0.5, 0.75}) {
    const NormalizedMap f = cat("ricker-delay", {{"b", b}});
    const GradientVector v0 = gradient(f);
    const auto seq = v_sequence(v0, 2);
    o.near(seq[1].a[0], 1 - b, 1e-12, "V1[0]");
    o.near(seq[1].a[1], -b, 1e-12, "V1[1]");
    o.near(seq[2].a[0], 1 - 2 * b, 1e-12, "V2[0]");
    o.near(seq[2].a[1], -b * (1 - b), 1e-12, "V2[1]");
    o.expect(slas_index(f).slas_index == 2, "slas_index 2 at b=" + dbl(b));
    const OneDimMap g = compose_g(f, calibrate_mobius(v0, column_sums_B(CompanionMatrix{v0.a}, 2)));
    o.near(g_prime_at_fixed_point(g), -b * std::fabs(b - 1) - std::fabs(2 * b - 1), 1e-9, "g'(1) at b=" + dbl(b));
  }
  o.detail << " tol 1e-12 (V), 1e-9 (g')";
  return o;
}

Outcome c3() {
  Outcome o;
  for (double a : {2.5, 3.0, 3.3, 3.4, 4.0}) {
    const SlasReport r = slas_index(cat("down-up-a", {{"a", a}}));
    const bool slas0 = r.norms[0] < 1.0;
    o.expect(slas0 == (a < 10.0 / 3), "SLAS(0) window at a=" + dbl(a));
    o.expect(slas0 == (r.spectral_radius < 1.0), "eigenvalues agree at a=" + dbl(a));
  }
  o.detail << " window 2<a<10/3";
  return o;
}

Outcome c4() {
  Outcome o;
  for (double a : {2.0, 3.0, 5.0}) {
    const NormalizedMap f = cat("mobius-rational-a", {{"a", a}});
    const GradientVector v = gradient(f);
    const double p = a * a - 4 * a - 1;
    o.near(v.one_norm(), (std::fabs(p) + a * a - 1) / (4 * a * a), 1e-12, "norm at a=" + dbl(a));
    const Slopes s = slopes_M1_M2(v.a[0], v.a[1]);
    o.near(s.M1, p / (1 - 5 * a * a), 1e-12, "M1 at a=" + dbl(a));
    o.near(s.M2, -(5 * a + 1) / (a + 1), 1e-12, "M2 at a=" + dbl(a));
    const Box box = grid_box(f);
    const EnvelopeReport r = check_definition_envelope(f, OneDimMap::from_expression(parse("max(2 - u1, 0)", 1), box.lo, box.hi));
    o.expect(r.definition_check.pass && r.definition_check.witnesses.empty() && r.definition_check.samples == 100000,
             "definition check at a=" + dbl(a));
  }
  o.detail << " tol 1e-12, 1e5 samples";
  return o;
}

Outcome c5() {
  Outcome o;
  {
    const NormalizedMap f = cat("decdec", {{"b", 0.5}});
    o.expect(slas_index(f).slas_index == 0, "b=0.5 SLAS(0)");
    const PseudoFixedReport p = pseudo_fixed_points(f, monotonicity_profile(f));
    o.expect(p.points.empty(), "b=0.5 no pseudo-fixed points");
    o.expect(p.diagonal_cycles.none(), "b=0.5 diagonal map 2-cycle-free");
  }
  const double b = 1.5;
  const NormalizedMap f = cat("decdec", {{"b", b}});
  o.expect(slas_index(f).slas_index == 1, "b=1.5 SLAS(1)");
  const MonotonicityProfile prof = monotonicity_profile(f);
  const PseudoFixedReport p = pseudo_fixed_points(f, prof);
  o.expect(p.points.size() == 1, "b=1.5 one pseudo-fixed pair");
  OneDimMap d = OneDimMap::from_expression(parse("6.25/(1.5*u1 + 1)^2", 1), 1e-3, 10.0);
  const TwoCycleReport cyc = find_two_cycles(d);
  if (p.points.size() == 1 && cyc.cycles.size() == 1) {
    o.near(p.points[0].x, cyc.cycles[0].first, 1e-8, "pseudo x vs 2-cycle");
    o.near(p.points[0].y, cyc.cycles[0].second, 1e-8, "pseudo y vs 2-cycle");
  } else {
    o.expect(false, "2-cycle of (b+1)^2/(bx+1)^2");
  }
  o.expect(embedding_gas_verdict(f, prof).verdict == "Inconclusive", "embedding Inconclusive");
  const NormalizedMap f1 = expand(f, 1);
  o.expect(monotonicity_profile(f1).is({Monotone::Decreasing, Monotone::Increasing}), "F1 (decreasing, increasing)");
  const Box box = grid_box(f1);
  const OneDimMap g = OneDimMap::from_expression(canonical_phi2(b), box.lo, box.hi);
  const OneDimMap g2 = OneDimMap::from_expression(parse("2.5/(1.5*u1 + 1)", 1), box.lo, box.hi);
  o.expect(std::fabs(g(0.7) - g2(0.7)) < 1e-15, "Mobius form (b+1)/(bx+1)");
  o.expect(check_definition_envelope(f1, g2).definition_check.pass, "Mobius envelope check");
  o.expect(gas_certificate(f).certified, "overall GAS-certified");
  o.detail << " tol 1e-8 (pseudo pair)";
  return o;
}

Outcome c6() {
  Outcome o;
  const double h = 1.0;
  {
    const NormalizedMap f = cat("ricker-stocking", {{"xbar", 1.5}});
    o.near(gradient(f).one_norm(), 5.0 / 6, 1e-9, "||V0|| at 1.5");
    const Verdict v = gas_certificate(f);
    o.expect(v.certified && v.route == "Th-IncrDecr", "certified via the phi route");
    const ImplicitPhi ip = phi_from_implicit(f);
    const double b = f.base.params.at("b"), xbar = f.xbar;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const double x = ip.phi.lo + (ip.phi.hi - ip.phi.lo) * (i + 0.5) / 100;
      worst = std::max(worst, std::fabs(ip.phi(x) - h / (xbar * (1 - std::exp(b - xbar * x)))));
    }
    o.near(worst, 0.0, 1e-7, "phi vs closed form");
  }
  {
    const NormalizedMap f = cat("ricker-stocking", {{"xbar", 1.7}});
    o.expect(gradient(f).one_norm() > 1.0, "||V0|| > 1 at 1.7");
    o.expect(slas_index(f).norms[0] >= 1.0, "m=0 SLAS fails at 1.7");
  }
  double lo = 1.2, hi = 2.5;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gradient(cat("ricker-stocking", {{"xbar", mid}})).one_norm() < 1.0 ? lo : hi) = mid;
  }
  o.near(0.5 * (lo + hi), (1 + std::sqrt(5.0)) / 2, 1e-9, "threshold h*");
  o.detail << " tol 1e-9 (norm, h*), 1e-7 (phi)";
  return o;
}

Outcome c7() {
  Outcome o;
  const NormalizedMap f = cat("bx-over-1py", {{"b", 2.0}});
  const MonotonicityProfile p = monotonicity_profile(f);
  o.expect(embedding_region_omega(f, p, 256).empty, "Omega empty at 256^2");
  o.expect(embedding_gas_verdict(f, p).verdict == "Inconclusive", "embedding Inconclusive");
  o.detail << " grid 256^2";
  return o;
}

Outcome c8() {
  Outcome o;
#ifdef GASCERT_PROPERTIES_BIN
  const std::string cmd = std::string("\"") + GASCERT_PROPERTIES_BIN +
                          "\" --minimal -tc=\"dual partials*,chain rule*,Omega lies*,enveloping is inherited*,"
                          "decreasing-decreasing*\"";
  o.expect(std::system(cmd.c_str()) == 0, "property suites (i)-(v)");
#else
  o.expect(false, "property binary not configured");
#endif
  o.detail << " suites (i)-(v)";
  return o;
}

Outcome c9() {
  Outcome o;
  std::vector<std::pair<std::string, ParamMap>> cfgs = {{"linear-neg", {}}};
  for (double b : {0.25, 0.5, 0.75}) cfgs.push_back({"ricker-delay", {{"b", b}}});
  for (double a : {2.5, 3.0, 3.3, 3.4, 4.0}) cfgs.push_back({"down-up-a", {{"a", a}}});
  for (double a : {2.0, 3.0, 5.0}) cfgs.push_back({"mobius-rational-a", {{"a", a}}});
  for (double b : {0.5, 1.5}) cfgs.push_back({"decdec", {{"b", b}}});
  for (double x : {1.5, 1.7}) cfgs.push_back({"ricker-stocking", {{"xbar", x}}});
  cfgs.push_back({"bx-over-1py", {{"b", 2.0}}});
  int certified = 0;
  for (const auto& [name, p] : cfgs) {
    const NormalizedMap f = cat(name, p);
    if (!gas_certificate(f).certified) continue;
    ++certified;
    const BasinReport b = basin_sample(f, 200, 1, 1e-6, 100000);
    o.expect(b.fraction == 1.0, "basin of " + name);
  }
  o.detail << " " << certified << " certified configs, 200 orbits, tol 1e-6";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "linear-neg expansion gradients", 1, c1},   {2, "delayed Ricker closed forms", 1, c2},
      {3, "down-up-a SLAS window", 1, c3},            {4, "mobius-rational-a enveloping", 30, c4},
      {5, "decdec pipeline", 60, c5},                 {6, "Ricker with stocking", 60, c6},
      {7, "embedding vacuousness", 10, c7},           {8, "property suites", 300, c8},
      {9, "basin corroboration", 120, c9}};
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " error: " << e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && s < c.limit_s;
    if (!ok) ++failed;
    std::printf("%s criterion %d %-32s %8.3f s (limit %g s)%s\n", ok ? "PASS" : "FAIL", c.id, c.name, s, c.limit_s,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
