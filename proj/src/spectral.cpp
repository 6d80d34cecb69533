#include "gascert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gascert {

double GradientVector::one_norm() const {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

std::string to_string(SlasClass c) {
  switch (c) {
    case SlasClass::SLAS: return "SLAS";
    case SlasClass::LASNotYetSLAS: return "LAS-not-yet-SLAS";
    case SlasClass::Unstable: return "Unstable";
    case SlasClass::NonHyperbolic: return "NonHyperbolic";
  }
  return "";
}

std::string SlasReport::tag() const {
  if (classification == SlasClass::SLAS && slas_index)
    return "SLAS(" + std::to_string(*slas_index) + ")";
  return to_string(classification);
}

GradientVector gradient(const NormalizedMap& nm) {
  std::vector<double> ones(static_cast<std::size_t>(nm.k), 1.0);
  DualVector d = nm.f0.eval_dual(ones);
  GradientVector g;
  g.a = d.partials;
  g.m = nm.expansion;
  g.non_differentiable = d.non_differentiable;
  return g;
}

std::vector<GradientVector> v_sequence(const GradientVector& v0, int m_max) {
  if (m_max < 0) throw Error("v_sequence: m_max must be non-negative");
  const std::size_t k = v0.a.size();
  std::vector<GradientVector> out{v0};
  out.reserve(static_cast<std::size_t>(m_max) + 1);
  for (int m = 1; m <= m_max; ++m) {
    const auto& v = out.back().a;
    GradientVector next;
    next.a.resize(k);
    next.m = v0.m + m;
    next.non_differentiable = v0.non_differentiable;
    for (std::size_t i = 0; i < k; ++i) next.a[i] = v0.a[i] * v[0] + (i + 1 < k ? v[i + 1] : 0.0);
    out.push_back(std::move(next));
  }
  return out;
}

SlasReport slas_report(const GradientVector& v0, int m_max) {
  SlasReport r;
  r.m_max = m_max;
  for (const auto& v : v_sequence(v0, m_max)) {
    r.norms.push_back(v.one_norm());
    if (!r.slas_index && r.norms.back() < 1.0) r.slas_index = static_cast<int>(r.norms.size()) - 1;
  }
  r.eigenvalues = eigenvalues(CompanionMatrix{v0.a});
  for (const auto& z : r.eigenvalues) r.moduli.push_back(std::abs(z));
  r.spectral_radius = r.moduli.empty() ? 0.0 : r.moduli.front();
  const bool on_circle = std::any_of(r.moduli.begin(), r.moduli.end(),
                                     [](double m) { return std::fabs(m - 1.0) <= tol_hyp; });
  if (v0.non_differentiable) r.warnings.push_back("map is not differentiable at the fixed point");
  if (on_circle) {
    r.classification = SlasClass::NonHyperbolic;
  } else if (r.spectral_radius > 1.0) {
    r.classification = SlasClass::Unstable;
    if (r.slas_index) r.warnings.push_back("norm below 1 despite spectral radius above 1");
  } else if (r.slas_index) {
    r.classification = SlasClass::SLAS;
  } else {
    r.classification = SlasClass::LASNotYetSLAS;
    r.warnings.push_back("spectral radius < 1 but no expansion up to m_max = " +
                         std::to_string(m_max) + " has norm < 1; raise m_max");
  }
  return r;
}

SlasReport slas_index(const NormalizedMap& nm, int m_max) { return slas_report(gradient(nm), m_max); }

namespace {

using cd = std::complex<double>;

// Monic coefficients, highest degree first: p = [1, -a_1, ..., -a_k].
cd horner(const std::vector<double>& p, cd z, cd* derivative = nullptr) {
  cd v = p[0], d = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    d = d * z + v;
    v = v * z + p[i];
  }
  if (derivative) *derivative = d;
  return v;
}

double residual_scale(const std::vector<double>& p, double r) {
  double s = 0.0, zp = 1.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    s += std::fabs(*it) * zp;
    zp *= r;
  }
  return std::max(1.0, s);
}

std::vector<cd> aberth(const std::vector<double>& p) {
  const std::size_t n = p.size() - 1;
  double bound = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) bound = std::max(bound, std::fabs(p[i]));
  const double radius = 0.5 * (1.0 + bound);
  std::vector<cd> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) + 0.4;
    z[i] = std::polar(radius, th);
  }
  bool converged = false;
  for (int iter = 0; iter < 1000 && !converged; ++iter) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      cd d;
      cd v = horner(p, z[i], &d);
      if (v == cd(0.0)) continue;
      cd ratio = v / d;
      cd sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      cd w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = ratio;
      z[i] -= w;
      if (std::abs(w) > 1e-15 * (1.0 + std::abs(z[i]))) converged = false;
    }
  }
  for (auto& zi : z) {
    for (int it = 0; it < 5; ++it) {
      cd d;
      cd v = horner(p, zi, &d);
      if (d == cd(0.0)) break;
      cd next = zi - v / d;
      if (std::abs(horner(p, next)) < std::abs(v)) zi = next;
      else break;
    }
    const double res = std::abs(horner(p, zi));
    if (res > 1e-10 * residual_scale(p, std::abs(zi)))
      throw Error("eigenvalues: root finder did not converge (residual " + std::to_string(res) + ")");
  }
  return z;
}

}  // namespace

std::vector<cd> eigenvalues(const CompanionMatrix& c) {
  const std::size_t k = c.a.size();
  if (k == 0) throw Error("eigenvalues: empty companion matrix");
  std::vector<double> p{1.0};
  for (double a : c.a) p.push_back(-a);
  std::vector<cd> roots;
  while (p.size() > 1 && p.back() == 0.0) {
    roots.emplace_back(0.0, 0.0);
    p.pop_back();
  }
  const std::size_t n = p.size() - 1;
  if (n == 1) {
    roots.emplace_back(-p[1], 0.0);
  } else if (n == 2) {
    const double b = p[1], cc = p[2];
    const double disc = b * b - 4.0 * cc;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      roots.emplace_back(q, 0.0);
      roots.emplace_back(q != 0.0 ? cc / q : 0.0, 0.0);
    } else {
      const double im = 0.5 * std::sqrt(-disc);
      roots.emplace_back(-0.5 * b, im);
      roots.emplace_back(-0.5 * b, -im);
    }
  } else if (n >= 3) {
    for (const auto& z : aberth(p)) {
      // Snap numerically real roots onto the axis.
      const double scale = std::max(1.0, std::abs(z));
      roots.push_back(std::fabs(z.imag()) < 1e-13 * scale ? cd(z.real(), 0.0) : z);
    }
  }
  std::stable_sort(roots.begin(), roots.end(), [](const cd& x, const cd& y) {
    const double ax = std::abs(x), ay = std::abs(y);
    if (ax != ay) return ax > ay;
    return x.imag() > y.imag();
  });
  return roots;
}

Matrix companion(const CompanionMatrix& c) {
  const std::size_t k = c.a.size();
  Matrix m(k, std::vector<double>(k, 0.0));
  for (std::size_t j = 0; j < k; ++j) m[0][j] = c.a[j];
  for (std::size_t i = 1; i < k; ++i) m[i][i - 1] = 1.0;
  return m;
}

Matrix transpose(const Matrix& m) {
  if (m.empty()) return m;
  Matrix t(m[0].size(), std::vector<double>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), p = b.size(), q = b.empty() ? 0 : b[0].size();
  Matrix c(n, std::vector<double>(q, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < p; ++l) {
      const double v = a[i][l];
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < q; ++j) c[i][j] += v * b[l][j];
    }
  return c;
}

Matrix matpow(const Matrix& m, int n) {
  if (n < 0) throw Error("matpow: negative exponent");
  Matrix r(m.size(), std::vector<double>(m.size(), 0.0));
  for (std::size_t i = 0; i < m.size(); ++i) r[i][i] = 1.0;
  for (int i = 0; i < n; ++i) r = matmul(r, m);
  return r;
}

double norm_inf(const Matrix& m) {
  double best = 0.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (double v : row) s += std::fabs(v);
    best = std::max(best, s);
  }
  return best;
}

double norm_one(const Matrix& m) { return norm_inf(transpose(m)); }

NormDecay norm_decay(const CompanionMatrix& c, int n_max) {
  if (n_max < 1) throw Error("norm_decay: n_max must be at least 1");
  NormDecay out;
  const Matrix j = companion(c);
  Matrix p = j;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) p = matmul(p, j);
    double biggest = 0.0;
    for (const auto& row : p)
      for (double v : row) biggest = std::max(biggest, std::fabs(v));
    if (biggest > 1e300 || !std::isfinite(biggest)) {
      out.overflow = true;
      break;
    }
    out.norms.emplace_back(norm_inf(p), norm_one(p));
  }
  return out;
}

std::vector<double> column_sums_B(const CompanionMatrix& c, int m) {
  if (m < 0) throw Error("column_sums_B: m must be non-negative");
  const Matrix jm = matpow(companion(c), m);
  const Matrix v = transpose(jm);
  const double cap = norm_inf(jm);
  const std::size_t k = c.a.size();
  std::vector<double> b(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += v[i][j];
    b[j] = std::fabs(s);
    if (b[j] > cap * (1.0 + 1e-12)) throw Error("column_sums_B: B_j exceeds the inf-norm bound");
  }
  return b;
}

NormalizedMap expand(const NormalizedMap& nm, int j) {
  if (j < 0) throw Error("expand: j must be non-negative");
  NormalizedMap out = nm;
  out.expansion = j;
  out.f0 = nm.seed;
  const int k = nm.k;
  std::vector<Expression> repl;
  repl.push_back(nm.seed);
  for (int i = 1; i < k; ++i) repl.push_back(Expression::variable(i));
  for (int step = 1; step <= j; ++step) out.f0 = out.f0.substitute(repl);
  if (j == 0) return out;

  std::vector<double> ones(static_cast<std::size_t>(k), 1.0);
  DualVector d = out.f0.eval_dual(ones);
  if (std::fabs(d.value - 1.0) > 1e-10)
    throw Error("expand: F_" + std::to_string(j) + "(1,...,1) = " + std::to_string(d.value));
  GradientVector seed_grad;
  seed_grad.a = nm.seed.eval_dual(ones).partials;
  const auto expected = v_sequence(seed_grad, j).back().a;
  for (int i = 0; i < k; ++i) {
    if (std::fabs(d.partials[i] - expected[i]) > 1e-9 * std::max(1.0, std::fabs(expected[i])))
      throw Error("expand: gradient of F_" + std::to_string(j) + " disagrees with (J^t)^j V_0");
  }
  return out;
}

}  // namespace gascert
