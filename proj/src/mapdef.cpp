#include "gascert/mapdef.hpp"

#include <algorithm>
#include <cmath>

namespace gascert {

namespace {

NameSet names_of(const ParamMap& params) {
  NameSet out;
  for (const auto& [k, v] : params) out.insert(k);
  return out;
}

double diagonal_residual(const Expression& f, int k, double x) {
  std::vector<double> pt(static_cast<std::size_t>(k), x);
  return f.eval(pt) - x;
}

}  // namespace

MapSpec make_map(std::string name, int k, const std::string& expr_text, ParamMap params, double lo,
                 double hi, std::optional<double> fixed_point) {
  MapSpec m;
  m.name = std::move(name);
  m.k = k;
  m.expr_text = expr_text;
  m.f = parse(expr_text, k, names_of(params));
  m.params = std::move(params);
  m.lo = lo;
  m.hi = hi;
  m.fixed_point = fixed_point;
  return m;
}

void validate(const MapSpec& m) {
  if (m.k < 1) throw Error("map '" + m.name + "': k must be positive");
  if (!(m.lo < m.hi) || !std::isfinite(m.lo) || !std::isfinite(m.hi))
    throw Error("map '" + m.name + "': domain needs finite lo < hi");
  if (m.f.arity() > m.k) throw Error("map '" + m.name + "': expression uses more than k variables");
  for (const auto& p : m.f.parameters())
    if (!m.params.count(p)) throw Error("map '" + m.name + "': parameter '" + p + "' has no value");
  if (m.fixed_point) {
    const double x = *m.fixed_point;
    if (!(m.lo < x && x < m.hi))
      throw Error("map '" + m.name + "': fixed point outside the open domain");
    const double r = diagonal_residual(m.bound(), m.k, x);
    if (std::fabs(r) > 1e-10 * std::max(1.0, std::fabs(x)))
      throw Error("map '" + m.name + "': declared fixed point has residual " + std::to_string(r));
  }
}

std::vector<double> fixed_point_roots(const MapSpec& m, int cells) {
  const Expression f = m.bound();
  const double h = (m.hi - m.lo) / cells;
  auto r = [&](double x) -> std::optional<double> {
    std::vector<double> pt(static_cast<std::size_t>(m.k), x);
    auto v = f.try_eval(pt);
    if (!v) return std::nullopt;
    return *v - x;
  };
  // Roots closer than this to an end count as boundary fixed points.
  const double edge = 1e-9 * std::max(1.0, m.hi - m.lo);
  std::vector<double> roots;
  auto keep = [&](double x) {
    if (x - m.lo <= edge || m.hi - x <= edge) return;
    if (!roots.empty() && std::fabs(roots.back() - x) < 1e-9 * std::max(1.0, std::fabs(x))) return;
    roots.push_back(x);
  };
  std::optional<double> prev = r(m.lo);
  double prev_x = m.lo;
  for (int i = 1; i <= cells; ++i) {
    const double x = i == cells ? m.hi : m.lo + i * h;
    std::optional<double> cur = r(x);
    if (prev && *prev == 0.0) keep(prev_x);
    if (prev && cur && *prev != 0.0 && *cur != 0.0 && (*prev < 0) != (*cur < 0)) {
      double a = prev_x, b = x, fa = *prev;
      while (b - a > 1e-12 * std::max(1.0, std::fabs(a))) {
        const double mid = 0.5 * (a + b);
        auto fm = r(mid);
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
      keep(0.5 * (a + b));
    }
    prev = cur;
    prev_x = x;
  }
  if (prev && *prev == 0.0) keep(prev_x);
  return roots;
}

double find_fixed_point(const MapSpec& m, bool expect_unique) {
  MapSpec probe = m;
  probe.fixed_point.reset();
  validate(probe);
  auto roots = fixed_point_roots(m);
  if (roots.empty()) throw Error("map '" + m.name + "': no interior fixed point found");
  if (expect_unique && roots.size() > 1) {
    std::string list;
    for (double x : roots) list += (list.empty() ? "" : ", ") + std::to_string(x);
    throw Error("map '" + m.name + "': multiple interior fixed points: " + list);
  }
  return roots.front();
}

NormalizedMap normalize(const MapSpec& m, double xbar) {
  if (!(xbar > 0.0) || !std::isfinite(xbar)) throw Error("normalize: fixed point must be positive");
  NormalizedMap nm;
  nm.base = m;
  nm.xbar = xbar;
  nm.k = m.k;
  const Expression bound = m.bound();
  if (xbar == 1.0) {
    nm.f0 = bound;
  } else {
    std::vector<Expression> scaled;
    for (int i = 1; i <= m.k; ++i) scaled.push_back(Expression::constant(xbar) * Expression::variable(i));
    nm.f0 = bound.substitute(scaled) / Expression::constant(xbar);
  }
  nm.seed = nm.f0;
  nm.lo = m.lo / xbar;
  nm.hi = m.hi / xbar;
  nm.unbounded_below = m.unbounded_below;
  nm.unbounded_above = m.unbounded_above;
  std::vector<double> ones(static_cast<std::size_t>(m.k), 1.0);
  const double r = nm.f0.eval(ones) - 1.0;
  if (std::fabs(r) > 1e-10 * std::max(1.0, xbar) / xbar)
    throw Error("normalize: F(xbar) != xbar (residual " + std::to_string(r) + ")");
  return nm;
}

NormalizedMap normalize(const MapSpec& m) {
  validate(m);
  return normalize(m, m.fixed_point ? *m.fixed_point : find_fixed_point(m));
}

double ricker_stocking_b(double xbar, double h) {
  if (!(xbar > h) || !(h > 0)) throw Error("ricker-stocking needs xbar > h > 0");
  return xbar + std::log(1.0 - h / xbar);
}

namespace {

std::vector<MapSpec> build_catalogue() {
  std::vector<MapSpec> c;
  auto add = [&c](MapSpec m, std::string desc, std::string cons,
                  std::map<std::string, std::pair<double, double>, std::less<>> ranges) {
    m.description = std::move(desc);
    m.constraints = std::move(cons);
    m.param_ranges = std::move(ranges);
    validate(m);
    c.push_back(std::move(m));
  };

  add(make_map("ricker-delay", 2, "u1*exp(b*(1 - u2))", {{"b", 0.5}}, 0.0, 5.0, 1.0),
      "delayed Ricker map", "b > 0", {{"b", {0.1, 1.9}}});

  // Linear maps are translated so the equilibrium sits at 1 instead of 0.
  {
    auto m = make_map("linear-neg", 2, "1 - 3/5*(u1 - 1) - 3/5*(u2 - 1)", {}, -9.0, 11.0, 1.0);
    m.unbounded_below = true;
    add(std::move(m), "linear map -3/5 x - 3/5 y, translated to equilibrium 1", "none", {});
  }
  {
    auto m = make_map("linear-neg2", 2, "1 + 3/5*(u1 - 1) - 3/5*(u2 - 1)", {}, -9.0, 11.0, 1.0);
    m.unbounded_below = true;
    add(std::move(m), "linear map 3/5 x - 3/5 y, translated to equilibrium 1", "none", {});
  }

  add(make_map("mobius-rational-a", 2,
               "a^2*u1/((1 + (a - 1)/2*u1)*(1 + (a - 1)/2*(u1 + u2)) + a*(a - 1)/2*u1)",
               {{"a", 3.0}}, 0.0, 10.0, 1.0),
      "a^2 x/((1+bx)(1+b(x+y))+abx) with b=(a-1)/2", "a > 1", {{"a", {1.5, 6.0}}});

  add(make_map("bh-product", 2,
               "b*(b + 2)^2/(b + 1)^2*(b*u1 + 1)*(b*u2 + 1)/(b*(b*u1 + 2)*(b*u2 + 2))",
               {{"b", 1.0}}, 0.0, 10.0, 1.0),
      "a(bx+1)(by+1)/(b(bx+2)(by+2)) with a chosen so that the equilibrium is 1",
      "b > 0, a = b(b+2)^2/(b+1)^2", {{"b", {0.3, 3.0}}});

  add(make_map("down-up-a", 2, "(a/2)*(u2 + 1)/(1 + u2 + (a - 2)*u1^2)", {{"a", 3.0}}, 0.0, 10.0,
               1.0),
      "(a/2)(y+1)/(1+y+(a-2)x^2)", "a > 2", {{"a", {2.2, 4.0}}});

  add(make_map("decdec", 2, "(b + 1)^2/((b*u1 + 1)*(b*u2 + 1))", {{"b", 0.5}}, 0.0, 10.0, 1.0),
      "(b+1)^2/((bx+1)(by+1))", "b > 0", {{"b", {0.2, 2.0}}});

  add(make_map("decdec-exp1", 2,
               "(b + 1)^2*(b*u2 + 1)/(b*(b + 1)^2 + (b*u1 + 1)*(b*u2 + 1))", {{"b", 0.5}}, 0.0,
               10.0, 1.0),
      "first expansion of decdec", "b > 0", {{"b", {0.2, 2.0}}});

  add(make_map("ricker-stocking", 2, "u1*exp(b - u2) + h",
               {{"b", ricker_stocking_b(1.5, 1.0)}, {"h", 1.0}}, 0.01, 15.0),
      "Ricker map with delay and stocking; param xbar sets b for a chosen equilibrium",
      "b > 0, h > 0", {});

  add(make_map("bx-over-1py", 2, "b*u1/(1 + u2)", {{"b", 2.0}}, 0.0, 10.0),
      "bx/(1+y), equilibrium b-1", "b > 1", {});

  return c;
}

}  // namespace

const std::vector<MapSpec>& catalogue() {
  static const std::vector<MapSpec> c = build_catalogue();
  return c;
}

std::vector<std::string> catalogue_names() {
  std::vector<std::string> out;
  for (const auto& m : catalogue()) out.push_back(m.name);
  return out;
}

MapSpec catalogue_entry(const std::string& name, const ParamMap& overrides) {
  const auto& c = catalogue();
  auto it = std::find_if(c.begin(), c.end(), [&](const MapSpec& m) { return m.name == name; });
  if (it == c.end()) throw Error("unknown catalogue map '" + name + "'");
  MapSpec m = *it;
  ParamMap rest = overrides;
  if (m.name == "ricker-stocking" && rest.count("xbar")) {
    const double xbar = rest.at("xbar");
    rest.erase("xbar");
    const double h = rest.count("h") ? rest.at("h") : m.params.at("h");
    if (rest.count("b")) throw Error("ricker-stocking: give either xbar or b, not both");
    m.params["h"] = h;
    m.params["b"] = ricker_stocking_b(xbar, h);
    m.hi = std::max(m.hi, 10.0 * xbar);
  }
  for (const auto& [k, v] : rest) {
    if (!m.params.count(k)) throw Error("map '" + name + "' has no parameter '" + k + "'");
    m.params[k] = v;
  }
  validate(m);
  return m;
}

}  // namespace gascert
