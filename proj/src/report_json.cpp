#include "gascert/report.hpp"

#include <charconv>
#include <cmath>

namespace gascert {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json params_json(const ParamMap& p) {
  Json o = Json::object();
  for (const auto& [k, v] : p) o[k] = num(v);
  return o;
}

}  // namespace

Json to_json(const MapSpec& m) {
  Json j;
  j["name"] = m.name;
  j["k"] = m.k;
  j["expression"] = m.expr_text;
  j["params"] = params_json(m.params);
  j["domain"] = {num(m.lo), num(m.hi)};
  j["unbounded_below"] = m.unbounded_below;
  j["unbounded_above"] = m.unbounded_above;
  j["fixed_point"] = m.fixed_point ? num(*m.fixed_point) : Json(nullptr);
  j["description"] = m.description;
  j["constraints"] = m.constraints;
  Json ranges = Json::object();
  for (const auto& [k, r] : m.param_ranges) ranges[k] = {num(r.first), num(r.second)};
  j["param_ranges"] = ranges;
  return j;
}

Json to_json(const NormalizedMap& nm) {
  Json j;
  j["name"] = nm.base.name;
  j["k"] = nm.k;
  j["expression"] = nm.base.expr_text;
  j["params"] = params_json(nm.base.params);
  j["xbar"] = num(nm.xbar);
  j["expansion"] = nm.expansion;
  j["normalized_expression"] = nm.f0.to_string();
  j["normalized_domain"] = {num(nm.lo), num(nm.hi)};
  return j;
}

Json to_json(const GradientVector& v) {
  return {{"a", nums(v.a)}, {"m", v.m}, {"one_norm", num(v.one_norm())},
          {"non_differentiable", v.non_differentiable}};
}

Json to_json(const SlasReport& r) {
  Json eig = Json::array();
  for (const auto& z : r.eigenvalues) eig.push_back({{"re", num(z.real())}, {"im", num(z.imag())}});
  Json j;
  j["norms"] = nums(r.norms);
  j["slas_index"] = r.slas_index ? Json(*r.slas_index) : Json(nullptr);
  j["eigenvalues"] = eig;
  j["moduli"] = nums(r.moduli);
  j["spectral_radius"] = num(r.spectral_radius);
  j["classification"] = to_string(r.classification);
  j["tag"] = r.tag();
  j["m_max"] = r.m_max;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const MonotonicityProfile& p) {
  Json args = Json::array();
  for (const auto& a : p.args)
    args.push_back({{"sign", to_string(a.sign)}, {"min_partial", num(a.min_partial)}, {"max_partial", num(a.max_partial)}});
  return {{"args", args}, {"grid_n", p.grid_n}, {"tag", p.tag()}};
}

Json to_json(const Slopes& s) {
  return {{"M1", s.M1_undefined ? Json(nullptr) : num(s.M1)},
          {"M2", s.M2_undefined ? Json(nullptr) : num(s.M2)},
          {"M1_undefined", s.M1_undefined},
          {"M2_undefined", s.M2_undefined},
          {"slas", s.slas},
          {"ordering_holds", s.ordering_holds}};
}

Json to_json(const CheckOutcome& c) {
  Json w = Json::array();
  for (const auto& x : c.witnesses) w.push_back({{"point", nums(x.point)}, {"value", num(x.value)}, {"where", x.where}});
  return {{"ran", c.ran},
          {"pass", c.pass},
          {"samples", c.samples},
          {"violations", c.violations},
          {"witnesses", w},
          {"note", c.note}};
}

Json to_json(const EnvelopeReport& r) {
  Json j;
  j["definition_check"] = to_json(r.definition_check);
  j["region_check"] = to_json(r.region_check);
  j["precondition"] = to_json(r.precondition);
  j["theorem_route"] = r.theorem_route;
  j["g"] = r.g_text;
  j["g_decreasing"] = r.g_decreasing;
  j["g_flat_tail"] = r.g_flat_tail;
  j["grid_n"] = r.grid_n;
  j["sampler_n"] = r.sampler_n;
  j["seed"] = r.seed;
  j["box"] = {num(r.box.lo), num(r.box.hi)};
  return j;
}

Json to_json(const TwoCycleReport& r) {
  Json c = Json::array();
  for (const auto& [p, q] : r.cycles) c.push_back({num(p), num(q)});
  return {{"cycles", c},
          {"none", r.none()},
          {"scan_resolution", r.scan_resolution},
          {"residual_bound", num(r.residual_bound)},
          {"min_abs_h", num(r.min_abs_h)},
          {"continuum", r.continuum},
          {"near_root_fraction", num(r.near_root_fraction)}};
}

Json to_json(const PseudoFixedReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back({{"x", num(p.x)}, {"y", num(p.y)}, {"residual", num(p.residual)}});
  Json failed = Json::array();
  for (const auto& [x, y] : r.failed_cells) failed.push_back({num(x), num(y)});
  return {{"points", pts},
          {"failed_cells", failed},
          {"grid_n", r.grid_n},
          {"used_diagonal_shortcut", r.used_diagonal_shortcut},
          {"diagonal_cycles", to_json(r.diagonal_cycles)}};
}

Json to_json(const EmbeddingVerdict& v) {
  Json j;
  j["certified"] = v.certified;
  j["verdict"] = v.verdict;
  j["failing_clause"] = v.failing_clause;
  j["fixed_points"] = nums(v.fixed_points);
  j["unique_fixed_point"] = v.unique_fixed_point;
  j["pseudo_fixed_points"] = to_json(v.pseudo);
  j["omega_count"] = v.omega_count;
  j["omega_empty"] = v.omega_empty;
  j["boxes_tested"] = v.boxes_tested;
  j["boxes_bracketed"] = v.boxes_bracketed;
  j["seed"] = v.seed;
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["verdict"] = v.verdict;
  j["certified"] = v.certified;
  j["slas"] = to_json(v.slas);
  j["fixed_points"] = nums(v.fixed_points);
  j["expansion_used"] = v.expansion_used >= 0 ? Json(v.expansion_used) : Json(nullptr);
  j["route"] = v.route;
  j["profile"] = v.profile ? to_json(*v.profile) : Json(nullptr);
  j["slopes"] = v.slopes ? to_json(*v.slopes) : Json(nullptr);
  j["envelope"] = v.envelope ? to_json(*v.envelope) : Json(nullptr);
  j["g"] = v.g_text;
  j["g_source"] = v.g_source;
  j["g_prime"] = v.certified ? num(v.g_prime) : Json(nullptr);
  j["g_cycles"] = v.g_cycles ? to_json(*v.g_cycles) : Json(nullptr);
  j["embedding"] = v.embedding ? to_json(*v.embedding) : Json(nullptr);
  Json att = Json::array();
  for (const auto& a : v.attempts)
    att.push_back({{"source", a.source}, {"g", a.g_text}, {"expansion", a.expansion}, {"outcome", a.outcome}});
  j["attempts"] = att;
  j["evidence"] = v.evidence;
  return j;
}

Json to_json(const OrbitResult& r, double xbar) {
  Json j;
  j["outcome"] = to_string(r.outcome);
  j["n_steps"] = r.outcome == OrbitOutcome::Converged ? Json(r.n_steps) : Json(nullptr);
  j["steps_taken"] = r.steps_taken;
  j["final_error"] = num(r.final_error);
  j["reason"] = r.reason;
  j["trajectory_points"] = r.trajectory.size();
  j["last_value"] = r.trajectory.empty() ? Json(nullptr) : num(r.trajectory.back().y * xbar);
  return j;
}

Json to_json(const BasinReport& b) {
  Json f = Json::array();
  for (const auto& x : b.failures)
    f.push_back({{"init", nums(x.init)}, {"outcome", to_string(x.outcome)}, {"final_error", num(x.final_error)},
                 {"reason", x.reason}});
  return {{"fraction", num(b.fraction)}, {"n_points", b.n_points}, {"converged", b.converged},
          {"seed", b.seed},             {"tol", num(b.tol)},        {"n_max", b.n_max},
          {"failures", f}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace gascert
