#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gascert/onedim.hpp"

namespace gascert {

// Normalized coordinate box used for grids and samplers: [max(lo, 1e-3), min(hi, 10)]
// for non-negative domains, [lo, min(hi, 10)] otherwise.
struct Box {
  double lo = 0.0;
  double hi = 1.0;
};
Box grid_box(const NormalizedMap& nm);

enum class Monotone { Increasing, Decreasing, Mixed };
std::string to_string(Monotone m);

struct ArgMonotonicity {
  Monotone sign = Monotone::Mixed;
  double min_partial = 0.0;
  double max_partial = 0.0;
};

struct MonotonicityProfile {
  std::vector<ArgMonotonicity> args;
  int grid_n = 0;

  bool has_mixed() const;
  bool is(std::initializer_list<Monotone> signs) const;
  std::string tag() const;  // e.g. "(decreasing,increasing)"
};

MonotonicityProfile monotonicity_profile(const NormalizedMap& f, int grid_n = 64);

// P_tau takes x on increasing arguments and y on decreasing ones; P_tau^t swaps.
std::pair<std::vector<double>, std::vector<double>> tau_points(const MonotonicityProfile& profile,
                                                               double x, double y);

struct PseudoFixedPoint {
  double x = 0.0;
  double y = 0.0;
  double residual = 0.0;
};

struct PseudoFixedReport {
  std::vector<PseudoFixedPoint> points;  // x < y, ascending
  std::vector<std::pair<double, double>> failed_cells;
  int grid_n = 64;
  bool used_diagonal_shortcut = false;
  TwoCycleReport diagonal_cycles;
};

PseudoFixedReport pseudo_fixed_points(const NormalizedMap& f, const MonotonicityProfile& profile,
                                      int grid_n = 64);

struct OmegaPoint {
  double x, y;
  bool in_omega;
};

struct OmegaReport {
  std::vector<OmegaPoint> points;  // grid points with x < y
  std::size_t count = 0;
  bool empty = true;
  int grid_n = 0;
};

OmegaReport embedding_region_omega(const NormalizedMap& f, const MonotonicityProfile& profile,
                                   int grid_n = 256);

struct EmbeddingVerdict {
  bool certified = false;
  std::string verdict;  // "GAS-embedding-certified" or "Inconclusive"
  std::string failing_clause;
  std::vector<double> fixed_points;
  bool unique_fixed_point = false;
  PseudoFixedReport pseudo;
  std::size_t omega_count = 0;
  bool omega_empty = true;
  int boxes_tested = 0;
  int boxes_bracketed = 0;
  std::uint64_t seed = 0;
};

EmbeddingVerdict embedding_gas_verdict(const NormalizedMap& f, const MonotonicityProfile& profile,
                                       std::uint64_t seed = 1, int boxes = 100, int omega_grid = 256);

}  // namespace gascert
