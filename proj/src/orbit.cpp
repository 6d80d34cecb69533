#include "gascert/orbit.hpp"

#include <cmath>
#include <random>

#include "gascert/embedding.hpp"
#include "gascert/parallel.hpp"

namespace gascert {

std::string to_string(OrbitOutcome o) {
  switch (o) {
    case OrbitOutcome::Converged: return "converged";
    case OrbitOutcome::Diverged: return "diverged";
    case OrbitOutcome::Period2Locked: return "period2-locked";
    case OrbitOutcome::MaxIter: return "max-iter";
  }
  return "";
}

namespace {

constexpr double kBlowUp = 1e6;

struct Walls {
  double lo, hi;
  bool closed_lo, closed_hi;

  bool outside(double y) const { return (closed_lo && y < lo) || (closed_hi && y > hi); }
};

// hist is newest first; step() reads it and returns the next value. The n0 values just
// below hist[0] are earlier orbit points of a forward-extended history, indexed 0..n0-1.
template <class Step>
OrbitResult run(Step&& step, std::vector<double> hist, const Walls& w, const OrbitOptions& opt, std::int64_t n0 = 0) {
  OrbitResult r;
  auto record = [&](std::int64_t n, double y) {
    if (opt.keep_trajectory && (n <= 10000 || n % 10 == 0)) r.trajectory.push_back({n, y});
  };
  int run_in = 0, run_p2 = 0;
  std::int64_t start = 0;
  for (std::int64_t i = n0; i >= 0; --i) {
    const double v = hist[static_cast<std::size_t>(i)];
    record(n0 - i, v);
    if (std::fabs(v - 1.0) < opt.tol) {
      if (run_in++ == 0) start = n0 - i;
    } else {
      run_in = 0;
    }
  }
  double y = hist[0];
  std::int64_t n = n0;
  auto done = [&](OrbitOutcome o, std::string why) {
    r.outcome = o;
    r.steps_taken = n;
    r.final_error = std::fabs(y - 1.0);
    r.reason = std::move(why);
    if (opt.keep_trajectory && (r.trajectory.empty() || r.trajectory.back().n != n)) r.trajectory.push_back({n, y});
    return r;
  };
  if (run_in >= opt.T) return (r.n_steps = start, done(OrbitOutcome::Converged, ""));
  while (n < opt.n_max + n0) {
    ++n;
    try {
      y = step(hist);
    } catch (const Error& e) {
      throw Error("orbit step " + std::to_string(n) + ": " + e.what());
    }
    for (std::size_t i = hist.size() - 1; i > 0; --i) hist[i] = hist[i - 1];
    hist[0] = y;
    record(n, y);
    if (!std::isfinite(y) || std::fabs(y) > kBlowUp) return done(OrbitOutcome::Diverged, "|y| exceeded 1e6");
    if (w.outside(y)) return done(OrbitOutcome::Diverged, "left the domain");
    run_in = std::fabs(y - 1.0) < opt.tol ? run_in + 1 : 0;
    if (run_in >= opt.T) {
      r.n_steps = n - opt.T + 1;
      return done(OrbitOutcome::Converged, "");
    }
    if (hist.size() >= 3) {
      const bool locked = std::fabs(y - hist[2]) < opt.tol && std::fabs(y - hist[1]) > 100.0 * opt.tol;
      run_p2 = locked ? run_p2 + 1 : 0;
      if (run_p2 >= opt.T) return done(OrbitOutcome::Period2Locked, "");
    }
  }
  return done(OrbitOutcome::MaxIter, "");
}

Walls walls_of(const NormalizedMap& nm) { return {nm.lo, nm.hi, !nm.unbounded_below, !nm.unbounded_above}; }

void require_in_domain(const Walls& w, const std::vector<double>& h) {
  for (double v : h)
    if (!std::isfinite(v) || w.outside(v)) throw Error("initial value " + std::to_string(v) + " is outside the domain");
}

}  // namespace

std::vector<double> compatible_history(const NormalizedMap& nm, const std::vector<double>& init) {
  const std::size_t k = static_cast<std::size_t>(nm.k);
  const std::size_t need = k + static_cast<std::size_t>(nm.expansion);
  if (init.size() == need) return init;
  if (init.size() != k)
    throw Error("initial history needs " + std::to_string(k) + " or " + std::to_string(need) + " values, got " +
                std::to_string(init.size()));
  std::vector<double> h = init;
  std::vector<double> args(k);
  while (h.size() < need) {
    for (std::size_t i = 0; i < k; ++i) args[i] = h[i];
    h.insert(h.begin(), nm.seed.eval(args));
  }
  return h;
}

OrbitResult iterate(const NormalizedMap& nm, const std::vector<double>& init, const OrbitOptions& opt) {
  const Walls w = walls_of(nm);
  require_in_domain(w, init);
  std::vector<double> hist = compatible_history(nm, init);
  const auto n0 = static_cast<std::int64_t>(hist.size() - init.size());
  const std::size_t k = static_cast<std::size_t>(nm.k), lag = static_cast<std::size_t>(nm.expansion);
  // Keep at least three values for the period-2 test.
  while (hist.size() < 3) hist.push_back(hist.back());
  std::vector<double> args(k);
  auto step = [&](const std::vector<double>& h) {
    for (std::size_t i = 0; i < k; ++i) args[i] = h[lag + i];
    return nm.f0.eval(args);
  };
  return run(step, std::move(hist), w, opt, n0);
}

OrbitResult iterate(const OneDimMap& g, double x0, const OrbitOptions& opt) {
  const Walls w{g.lo, g.hi, true, true};
  require_in_domain(w, {x0});
  auto step = [&](const std::vector<double>& h) { return g(h[0]); };
  return run(step, std::vector<double>{x0, x0, x0}, w, opt);
}

BasinReport basin_sample(const NormalizedMap& nm, int n_points, std::uint64_t seed, double tol,
                         std::int64_t n_max) {
  if (n_points < 1) throw Error("basin_sample: n_points must be at least 1");
  const Box box = grid_box(nm);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(box.lo, box.hi);
  std::vector<std::vector<double>> inits(static_cast<std::size_t>(n_points));
  for (auto& v : inits) {
    v.resize(static_cast<std::size_t>(nm.k));
    for (auto& x : v) x = U(rng);
  }
  OrbitOptions opt;
  opt.n_max = n_max;
  opt.tol = tol;
  opt.keep_trajectory = false;
  std::vector<OrbitResult> res(inits.size());
  parallel_for(inits.size(), [&](std::size_t i) {
    try {
      res[i] = iterate(nm, inits[i], opt);
    } catch (const Error& e) {
      res[i].outcome = OrbitOutcome::Diverged;
      res[i].final_error = NAN;
      res[i].reason = e.what();
    }
  }, 1);
  BasinReport b;
  b.n_points = n_points;
  b.seed = seed;
  b.tol = tol;
  b.n_max = n_max;
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res[i].outcome == OrbitOutcome::Converged)
      ++b.converged;
    else
      b.failures.push_back({inits[i], res[i].outcome, res[i].final_error, res[i].reason});
  }
  b.fraction = static_cast<double>(b.converged) / n_points;
  return b;
}

}  // namespace gascert
