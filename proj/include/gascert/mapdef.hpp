#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gascert/expr.hpp"

namespace gascert {

// x_{n+1} = F(x_n, ..., x_{n-k+1}); u1 is the newest state.
struct MapSpec {
  std::string name;
  int k = 1;
  std::string expr_text;
  Expression f;  // unbound; parameters resolved through `params`
  ParamMap params;
  double lo = 0.0;
  double hi = 10.0;
  // An unbounded end was truncated for grid work and is not a hard wall.
  bool unbounded_below = false;
  bool unbounded_above = true;
  std::optional<double> fixed_point;
  std::string description;
  std::string constraints;
  // Admissible parameter ranges used for randomized checks.
  std::map<std::string, std::pair<double, double>, std::less<>> param_ranges;

  Expression bound() const { return f.bind(params); }
};

struct NormalizedMap {
  MapSpec base;
  double xbar = 1.0;
  int k = 1;
  // The map in normalized coordinates; after expand() this is F_j.
  Expression f0;
  // F_0 itself, kept so further expansions compose from the original.
  Expression seed;
  int expansion = 0;
  double lo = 0.0;
  double hi = 10.0;
  bool unbounded_below = false;
  bool unbounded_above = true;

  double eval(std::span<const double> y) const { return f0.eval(y); }
  double eval(std::initializer_list<double> y) const { return f0.eval(y); }
};

MapSpec make_map(std::string name, int k, const std::string& expr_text, ParamMap params,
                 double lo, double hi, std::optional<double> fixed_point = std::nullopt);

// Checks k, domain, parameter binding and the declared fixed point.
void validate(const MapSpec& m);

// Interior sign-change roots of F(x,...,x) - x, ascending.
std::vector<double> fixed_point_roots(const MapSpec& m, int cells = 4096);
double find_fixed_point(const MapSpec& m, bool expect_unique = true);

NormalizedMap normalize(const MapSpec& m, double xbar);
// Uses the declared fixed point, or solves for it.
NormalizedMap normalize(const MapSpec& m);

const std::vector<MapSpec>& catalogue();
// Applies overrides and re-validates; unknown names raise Error.
MapSpec catalogue_entry(const std::string& name, const ParamMap& overrides = {});
std::vector<std::string> catalogue_names();

// Stocking parameter b placing the positive equilibrium of x e^{b-y} + h at xbar.
double ricker_stocking_b(double xbar, double h);

}  // namespace gascert
