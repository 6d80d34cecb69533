#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gascert/spectral.hpp"

using namespace gascert;

namespace {

NormalizedMap cat(const std::string& name, const ParamMap& p = {}) { return normalize(catalogue_entry(name, p)); }

std::vector<double> eigen_moduli(const std::vector<double>& a) {
  const int k = static_cast<int>(a.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) J(0, j) = a[j];
  for (int i = 1; i < k; ++i) J(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> m;
  for (int i = 0; i < k; ++i) m.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(m.rbegin(), m.rend());
  return m;
}

}  // namespace

TEST_CASE("gradients at the fixed point") {
  auto g = gradient(cat("ricker-delay", {{"b", 0.5}}));
  CHECK(g.m == 0);
  CHECK(g.a[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.a[1] == doctest::Approx(-0.5).epsilon(1e-14));
  g = gradient(cat("linear-neg"));
  CHECK(g.a[0] == doctest::Approx(-0.6).epsilon(1e-14));
  CHECK(g.a[1] == doctest::Approx(-0.6).epsilon(1e-14));
  CHECK(g.one_norm() == doctest::Approx(1.2).epsilon(1e-14));

  // Oracle: central finite differences of the decdec map at (1,1).
  const NormalizedMap dd = cat("decdec", {{"b", 0.5}});
  g = gradient(dd);
  const double h = 1e-6;
  const double fd1 = (dd.eval({1 + h, 1.0}) - dd.eval({1 - h, 1.0})) / (2 * h);
  const double fd2 = (dd.eval({1.0, 1 + h}) - dd.eval({1.0, 1 - h})) / (2 * h);
  CHECK(g.a[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(g.a[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(g.a[0] == doctest::Approx(fd1).epsilon(1e-8));
  CHECK(g.a[1] == doctest::Approx(fd2).epsilon(1e-8));
}

TEST_CASE("V_m recursion for the delayed Ricker map") {
  for (double b : {0.25, 0.5, 0.75, 1.3}) {
    const auto vs = v_sequence(GradientVector{{1.0, -b}, 0, false}, 2);
    REQUIRE(vs.size() == 3);
    CHECK(vs[0].a == std::vector<double>{1.0, -b});
    CHECK(vs[1].a[0] == doctest::Approx(1 - b).epsilon(1e-15));
    CHECK(vs[1].a[1] == doctest::Approx(-b).epsilon(1e-15));
    CHECK(vs[2].a[0] == doctest::Approx(1 - 2 * b).epsilon(1e-15));
    CHECK(vs[2].a[1] == doctest::Approx(-b * (1 - b)).epsilon(1e-15));
    CHECK(vs[2].m == 2);
  }
  const auto ln = v_sequence(GradientVector{{-0.6, -0.6}, 0, false}, 1);
  CHECK(std::fabs(ln[1].a[0] + 6.0 / 25.0) < 1e-15);
  CHECK(std::fabs(ln[1].a[1] - 9.0 / 25.0) < 1e-15);
  CHECK(ln[1].one_norm() == doctest::Approx(0.6).epsilon(1e-15));
  for (const auto& v : v_sequence(GradientVector{{0.0, 0.0, 0.0}, 0, false}, 5))
    CHECK(v.one_norm() == 0.0);
}

TEST_CASE("SLAS index examples") {
  SlasReport r = slas_index(cat("ricker-delay", {{"b", 0.5}}));
  CHECK(r.norms[0] == doctest::Approx(1.5));
  CHECK(r.norms[1] == doctest::Approx(1.0));
  CHECK(r.norms[2] == doctest::Approx(0.25));
  REQUIRE(r.slas_index.has_value());
  CHECK(*r.slas_index == 2);
  CHECK(r.classification == SlasClass::SLAS);
  CHECK(r.tag() == "SLAS(2)");

  r = slas_index(cat("linear-neg"));
  CHECK(*r.slas_index == 1);
  CHECK(std::fabs(r.norms[0] - 1.2) < 1e-12);
  CHECK(std::fabs(r.norms[1] - 0.6) < 1e-12);

  r = slas_index(cat("down-up-a", {{"a", 3.0}}));
  CHECK(*r.slas_index == 0);
  CHECK(std::fabs(r.norms[0] - 5.0 / 6.0) < 1e-12);
  r = slas_index(cat("down-up-a", {{"a", 3.5}}));
  CHECK(std::fabs(r.norms[0] - 15.0 / 14.0) < 1e-12);
}

TEST_CASE("classification: unstable, non-hyperbolic and not-yet-SLAS") {
  SlasReport r = slas_report(GradientVector{{1.0, -2.0}, 0, false});
  CHECK(r.classification == SlasClass::Unstable);
  CHECK(r.spectral_radius == doctest::Approx(std::sqrt(2.0)));
  r = slas_report(GradientVector{{0.0, 1.0}, 0, false});
  CHECK(r.classification == SlasClass::NonHyperbolic);
  // A double root at -0.99 decays too slowly for three expansion steps.
  r = slas_report(GradientVector{{-1.98, -0.9801}, 0, false}, 3);
  CHECK(r.classification == SlasClass::LASNotYetSLAS);
  CHECK_FALSE(r.warnings.empty());
  CHECK_FALSE(r.slas_index.has_value());
}

TEST_CASE("companion eigenvalues") {
  auto ev = eigenvalues(CompanionMatrix{{1.0, -0.5}});
  REQUIRE(ev.size() == 2);
  for (const auto& z : ev) {
    CHECK(z.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::fabs(z.imag()) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(z) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  }
  for (const auto& z : eigenvalues(CompanionMatrix{{0.0, 0.0, 0.0, 0.0}})) CHECK(std::abs(z) == 0.0);
  for (const auto& z : eigenvalues(CompanionMatrix{{-0.6, -0.6}}))
    CHECK(std::abs(z) == doctest::Approx(std::sqrt(0.6)).epsilon(1e-14));
}

TEST_CASE("eigenvalues for k >= 3 against Eigen") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 3 + trial % 5;
    std::vector<double> a(k);
    for (auto& x : a) x = U(rng);
    const auto ours = eigenvalues(CompanionMatrix{a});
    const auto ref = eigen_moduli(a);
    REQUIRE(ours.size() == static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) CHECK(std::abs(ours[i]) == doctest::Approx(ref[i]).epsilon(1e-8));
    for (const auto& z : ours) {
      std::complex<double> p = 1.0;
      for (int j = 0; j < k; ++j) p = p * z - a[j];
      double scale = 1.0;
      for (double x : a) scale += std::fabs(x);
      CHECK(std::abs(p) < 1e-9 * scale * std::pow(std::max(1.0, std::abs(z)), k));
    }
  }
}

TEST_CASE("norm decay") {
  const NormDecay d = norm_decay(CompanionMatrix{{1.0, -0.5}}, 40);
  CHECK(d.norms.size() == 40);
  CHECK(d.norms.back().first < 1e-4);
  CHECK(d.norms.back().second < 1e-4);
  const NormDecay perm = norm_decay(CompanionMatrix{{0.0, 1.0}}, 30);
  for (const auto& [inf, one] : perm.norms) {
    CHECK(inf == 1.0);
    CHECK(one == 1.0);
  }
  const NormDecay up = norm_decay(CompanionMatrix{{1.0, -2.0}}, 60);
  for (std::size_t n = 10; n + 1 < up.norms.size(); ++n) CHECK(up.norms[n + 1].first >= up.norms[n].first);
  CHECK(up.norms[39].second > 100.0 * up.norms[9].second);
  CHECK_FALSE(up.overflow);
  CHECK(norm_decay(CompanionMatrix{{3.0, 3.0}}, 1000).overflow);
}

TEST_CASE("column sums B") {
  CHECK(column_sums_B(CompanionMatrix{{1.0, -0.5}}, 0) == std::vector<double>{1.0, 1.0});
  const CompanionMatrix c{{1.0, -0.5}};
  const auto B = column_sums_B(c, 2);
  const Matrix P = matpow(transpose(companion(c)), 2);
  const double ninf = norm_inf(matpow(companion(c), 2));
  for (int j = 0; j < 2; ++j) {
    CHECK(B[j] == doctest::Approx(std::fabs(P[0][j] + P[1][j])).epsilon(1e-15));
    CHECK(B[j] <= ninf);
  }
  for (const auto& name : {"ricker-delay", "linear-neg", "decdec", "down-up-a", "ricker-stocking"}) {
    const auto Bm = column_sums_B(CompanionMatrix{gradient(cat(name)).a}, 64);
    CHECK(*std::max_element(Bm.begin(), Bm.end()) < 0.1);
  }
}

TEST_CASE("expansions") {
  const NormalizedMap ln = cat("linear-neg");
  const NormalizedMap f1 = expand(ln, 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-3.0, 4.0);
  for (int i = 0; i < 10; ++i) {
    const double x = U(rng), y = U(rng);
    // In deviations from the fixed point F_1 is -(6/25)x + (9/25)y.
    CHECK(std::fabs(f1.eval({x, y}) - 1.0 - (-6.0 / 25.0 * (x - 1) + 9.0 / 25.0 * (y - 1))) < 1e-12);
  }
  const auto ga = gradient(f1).a;
  CHECK(std::fabs(ga[0] + 6.0 / 25.0) < 1e-12);
  CHECK(std::fabs(ga[1] - 9.0 / 25.0) < 1e-12);

  for (double b : {0.5, 1.5}) {
    const NormalizedMap d1 = expand(cat("decdec", {{"b", b}}), 1);
    const MapSpec ex = catalogue_entry("decdec-exp1", {{"b", b}});
    std::uniform_real_distribution<double> P(0.0, 5.0);
    for (int i = 0; i < 10; ++i) {
      const double x = P(rng), y = P(rng);
      CHECK(d1.eval({x, y}) == doctest::Approx(ex.bound().eval({x, y})).epsilon(1e-13));
    }
  }
  const NormalizedMap rd = cat("ricker-delay");
  CHECK(structurally_equal(expand(rd, 0).f0, rd.f0));
  CHECK(expand(rd, 0).expansion == 0);
  CHECK(expand(expand(rd, 2), 3).expansion == 3);
}
