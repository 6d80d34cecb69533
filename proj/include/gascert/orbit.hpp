#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gascert/onedim.hpp"

namespace gascert {

enum class OrbitOutcome { Converged, Diverged, Period2Locked, MaxIter };
std::string to_string(OrbitOutcome o);

struct OrbitSample {
  std::int64_t n;
  double y;
};

struct OrbitResult {
  // Every step up to 1e4, then every 10th; the final step is always kept.
  std::vector<OrbitSample> trajectory;
  OrbitOutcome outcome = OrbitOutcome::MaxIter;
  std::int64_t n_steps = 0;  // converged: first step of the final run inside tol
  std::int64_t steps_taken = 0;
  double final_error = 0.0;
  std::string reason;
};

struct OrbitOptions {
  std::int64_t n_max = 100000;
  double tol = 1e-8;
  int T = 50;
  bool keep_trajectory = true;
};

// init is the history (y_0, y_{-1}, ...) in normalized coordinates. For an expansion F_j
// the recursion is y_{n+1} = F_j(y_{n-j}, ..., y_{n-j-k+1}) and needs k + j values; a
// history of length k is extended forward with F_0 to the compatible one.
OrbitResult iterate(const NormalizedMap& nm, const std::vector<double>& init, const OrbitOptions& opt = {});
OrbitResult iterate(const OneDimMap& g, double x0, const OrbitOptions& opt = {});

std::vector<double> compatible_history(const NormalizedMap& nm, const std::vector<double>& init);

struct BasinFailure {
  std::vector<double> init;
  OrbitOutcome outcome;
  double final_error;
  std::string reason;
};

struct BasinReport {
  double fraction = 0.0;
  int n_points = 0;
  int converged = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::int64_t n_max = 0;
  std::vector<BasinFailure> failures;
};

// Seeded uniform initial histories over grid_box(nm)^k.
BasinReport basin_sample(const NormalizedMap& nm, int n_points = 200, std::uint64_t seed = 1,
                         double tol = 1e-6, std::int64_t n_max = 100000);

}  // namespace gascert
