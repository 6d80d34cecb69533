#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gascert/embedding.hpp"

namespace gascert {

enum class RegionLabel { R, R1, R2, R3, R4, Boundary, FixedPointBand };
std::string to_string(RegionLabel l);

struct RegionSample {
  double x = 0.0, y = 0.0, value = 0.0;
  RegionLabel label = RegionLabel::Boundary;
};

struct Slopes {
  double M1 = 0.0, M2 = 0.0;
  bool M1_undefined = false;  // a2 == 1
  bool M2_undefined = false;  // a2 == 0
  bool slas = false;          // |a1| + |a2| < 1
  bool ordering_holds = true; // |M1| < 1 < |M2| whenever slas
};

Slopes slopes_M1_M2(double a1, double a2);

RegionLabel classify_value(double x, double y, double value);
RegionSample classify_point(const NormalizedMap& fj, double x, double y);
std::vector<RegionSample> region_grid(const NormalizedMap& fj, int n);

struct CurvePoint {
  double x, y;
};
// Roots of F(x,y) = y per grid column, and of F(x,y) = x per grid row.
std::vector<CurvePoint> trace_curve_y_eq_F(const NormalizedMap& fj, int n);
std::vector<CurvePoint> trace_curve_x_eq_F(const NormalizedMap& fj, int n);

struct Witness {
  std::vector<double> point;
  double value = 0.0;
  std::string where;
};

struct CheckOutcome {
  bool ran = false;
  bool pass = false;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::vector<Witness> witnesses;  // first 10, in sampling order
  std::string note;
};

struct EnvelopeReport {
  CheckOutcome definition_check;
  CheckOutcome region_check;
  CheckOutcome precondition;
  std::string theorem_route;
  std::string g_text;
  bool g_decreasing = false;
  bool g_flat_tail = false;
  int grid_n = 0;
  std::size_t sampler_n = 0;
  std::uint64_t seed = 0;
  Box box;
};

struct Sampler {
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::optional<Box> box;
};

// Halton points with a seeded Cranley-Patterson shift, scaled to box^k.
std::vector<double> halton_point(std::size_t index, int k, const std::vector<double>& shift, const Box& box);
std::vector<double> cp_shift(int k, std::uint64_t seed);

struct MonotoneCheck {
  bool decreasing = false;
  bool flat_tail = false;
  std::optional<double> witness;
};
MonotoneCheck check_decreasing(const OneDimMap& g, const Box& box, int grid_n = 2048);

EnvelopeReport check_definition_envelope(const NormalizedMap& f, const OneDimMap& g,
                                         const Sampler& sampler = {});
EnvelopeReport check_envelope_via_R(const NormalizedMap& fj, const OneDimMap& g, int grid_n = 512);

// Lower end of a forward-invariant sub-box: every value of F lies above it.
double absorbing_lower_bound(const NormalizedMap& f);

struct ImplicitPhi {
  OneDimMap phi;
  std::vector<double> knots;
  std::vector<double> values;
  double slope_at_one = 0.0;
  double expected_slope = 0.0;
};

ImplicitPhi phi_from_implicit(const NormalizedMap& f, int knots = 1024);
std::optional<double> phi_inverse(const OneDimMap& phi, double y);
OneDimMap g_from_phi(const NormalizedMap& f, const OneDimMap& phi);

EnvelopeReport check_envelope_incr_decr(const NormalizedMap& f, const OneDimMap& phi, int grid_n = 512,
                                        const Sampler& sampler = {});

struct CandidateAttempt {
  std::string source;
  std::string g_text;
  int expansion = 0;
  std::string outcome;
};

struct CertificateOptions {
  int m_max = 64;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  int grid_n = 512;
  int extra_expansions = 2;
};

struct Verdict {
  std::string verdict;  // GAS-certified(grid), LAS-only, Unstable, Inconclusive
  bool certified = false;
  SlasReport slas;
  std::vector<double> fixed_points;
  int expansion_used = -1;
  std::string route;
  std::optional<MonotonicityProfile> profile;
  std::optional<Slopes> slopes;
  std::optional<EnvelopeReport> envelope;
  std::string g_text;
  std::string g_source;
  double g_prime = 0.0;
  std::optional<TwoCycleReport> g_cycles;
  std::optional<EmbeddingVerdict> embedding;
  std::vector<CandidateAttempt> attempts;
  std::vector<std::string> evidence;
};

Verdict gas_certificate(const NormalizedMap& f0, const CertificateOptions& opt = {});

}  // namespace gascert
