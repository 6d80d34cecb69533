#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gascert/spectral.hpp"

namespace gascert {

// phi_j(t) = ((c_j - b_j + 1) + b_j t) / (1 + c_j t), so phi_j(1) = 1 and
// phi_j'(1) = (b_j - c_j) / (1 + c_j).
struct MobiusParams {
  std::vector<double> b;
  std::vector<double> c;

  bool degenerate(std::size_t j) const { return b[j] == c[j]; }
  double slope_at_one(std::size_t j) const { return (b[j] - c[j]) / (1.0 + c[j]); }
};

Expression mobius_phi(double b, double c);
// a(1+x)/(1+(2a-1)x) and (a+1)/(ax+1).
Expression canonical_phi1(double a);
Expression canonical_phi2(double a);
// (1-ax)/(a-(2a-1)x), self-inverse for every a.
Expression self_inverse_mobius(double a);

// A scalar map on [lo, hi], either an expression in u1 or a callable.
class OneDimMap {
 public:
  using Fn = std::function<double(double)>;

  OneDimMap() = default;
  static OneDimMap from_expression(Expression g, double lo, double hi, double fixed_point = 1.0);
  static OneDimMap from_function(Fn f, Fn df, double lo, double hi, double fixed_point,
                                 std::string description);

  double operator()(double x) const;
  std::optional<double> try_eval(double x) const noexcept;
  // Exact derivative; sets *non_differentiable when a kink is hit.
  double derivative(double x, bool* non_differentiable = nullptr) const;

  const std::optional<Expression>& expression() const { return expr_; }
  std::string describe() const;

  double lo = 0.0;
  double hi = 10.0;
  double fixed_point = 1.0;

 private:
  std::optional<Expression> expr_;
  Fn f_, df_;
  std::string description_;
};

MobiusParams calibrate_mobius(const GradientVector& v, const std::vector<double>& B,
                              const std::vector<double>& c);
MobiusParams calibrate_mobius_eps(const GradientVector& v, const std::vector<double>& c,
                                  double eps = 1e-3);
MobiusParams calibrate_mobius(const GradientVector& v, const std::vector<double>& B);

// g(t) = F(phi_1(t), ..., phi_k(t)) over the domain of fm.
OneDimMap compose_g(const NormalizedMap& fm, const MobiusParams& p);
OneDimMap compose_g(const NormalizedMap& fm, const std::vector<Expression>& phis);
// g(t) = F(t, ..., t).
OneDimMap diagonal_map(const NormalizedMap& fm);

double g_prime_at_fixed_point(const OneDimMap& g);

struct CheckResult {
  bool pass = true;
  std::vector<double> witnesses;  // first 10, ascending
  std::size_t violations = 0;
  std::size_t samples = 0;
};

CheckResult negative_feedback_check(const OneDimMap& g, int grid_n = 1000);

struct TwoCycleReport {
  std::vector<std::pair<double, double>> cycles;  // p < q
  int scan_resolution = 0;
  double residual_bound = 0.0;
  double min_abs_h = 0.0;
  bool continuum = false;
  double near_root_fraction = 0.0;

  bool none() const { return cycles.empty() && !continuum; }
};

TwoCycleReport find_two_cycles(const OneDimMap& g, int grid_n = 8192);

// Interior sign-change roots of g(x) - x.
std::vector<double> fixed_points_1d(const OneDimMap& g, int cells = 4096);

struct Gas1dVerdict {
  bool gas = false;
  std::vector<double> fixed_points;
  bool unique_fixed_point = false;
  double g_prime = 0.0;
  bool locally_stable = false;
  TwoCycleReport cycles;
};

Gas1dVerdict gas_1d(const OneDimMap& g, int grid_n = 8192);

struct SelfInverseReport {
  bool pass = false;
  bool self_inverse = false;
  bool separation = false;
  CheckResult self_inverse_check;
  CheckResult separation_check;
};

SelfInverseReport self_inverse_envelope_check(const OneDimMap& f, const OneDimMap& g,
                                              int grid_n = 2000);

}  // namespace gascert
