#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gascert/mapdef.hpp"

namespace gascert {

inline constexpr double tol_hyp = 1e-8;

struct GradientVector {
  std::vector<double> a;
  int m = 0;
  bool non_differentiable = false;

  double one_norm() const;
};

// First row a_1..a_k, ones on the subdiagonal.
struct CompanionMatrix {
  std::vector<double> a;
};

using Matrix = std::vector<std::vector<double>>;

enum class SlasClass { SLAS, LASNotYetSLAS, Unstable, NonHyperbolic };
std::string to_string(SlasClass c);

struct SlasReport {
  std::vector<double> norms;  // ||V_m||_1 for m = 0..m_max
  std::optional<int> slas_index;
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> moduli;
  double spectral_radius = 0.0;
  SlasClass classification = SlasClass::NonHyperbolic;
  int m_max = 64;
  std::vector<std::string> warnings;

  std::string tag() const;  // "SLAS(2)", "Unstable", ...
};

GradientVector gradient(const NormalizedMap& nm);
std::vector<GradientVector> v_sequence(const GradientVector& v0, int m_max);
SlasReport slas_report(const GradientVector& v0, int m_max = 64);
SlasReport slas_index(const NormalizedMap& nm, int m_max = 64);

// Roots of lambda^k - a_1 lambda^{k-1} - ... - a_k, by modulus descending.
std::vector<std::complex<double>> eigenvalues(const CompanionMatrix& c);

struct NormDecay {
  std::vector<std::pair<double, double>> norms;  // (inf-norm, 1-norm) of J^n, n = 1..
  bool overflow = false;
};
NormDecay norm_decay(const CompanionMatrix& c, int n_max);

Matrix companion(const CompanionMatrix& c);
Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matpow(const Matrix& m, int n);
double norm_inf(const Matrix& m);
double norm_one(const Matrix& m);

// B_j = |sum_i v_ij| where (J^t)^m = [v_ij].
std::vector<double> column_sums_B(const CompanionMatrix& c, int m);

// F_j of nm.seed by F_j(u) = F_{j-1}(F_0(u), u_1, ..., u_{k-1}); j is absolute.
NormalizedMap expand(const NormalizedMap& nm, int j);

}  // namespace gascert
