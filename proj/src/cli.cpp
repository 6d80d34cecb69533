#include "gascert/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "gascert/parallel.hpp"

namespace gascert {

namespace {

NameSet names_of(const ParamMap& p) {
  NameSet s;
  for (const auto& [k, v] : p) s.insert(k);
  return s;
}

Json header(const std::string& command) { return {{"command", command}, {"schema_version", 1}}; }

NormalizedMap normalized_expansion(const RunConfig& cfg, const MapSpec& m) {
  NormalizedMap nm = normalize(m);
  if (cfg.expansion < 0) throw Error("--expansion must be non-negative");
  return cfg.expansion > 0 ? expand(nm, cfg.expansion) : nm;
}

void require_k2(const MapSpec& m, const std::string& what) {
  if (m.k != 2) throw Error(what + " needs a map with k = 2; '" + m.name + "' has k = " + std::to_string(m.k));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

OneDimMap user_g(const RunConfig& cfg, const MapSpec& m, const Box& box) {
  Expression g = parse(cfg.g, 1, names_of(m.params)).bind(m.params);
  return OneDimMap::from_expression(g, box.lo, box.hi);
}

}  // namespace

MapSpec map_from_json(const Json& j, const ParamMap& overrides) {
  static const std::set<std::string> known = {"name", "k", "expr", "params", "domain", "fixed_point",
                                              "unbounded_below", "unbounded_above", "description", "constraints"};
  if (!j.is_object()) throw Error("map spec must be a JSON object");
  for (const auto& [key, val] : j.items())
    if (!known.count(key)) throw Error("map spec: unknown key '" + key + "'");
  for (const char* req : {"k", "expr", "domain"})
    if (!j.contains(req)) throw Error(std::string("map spec: missing key '") + req + "'");
  ParamMap params;
  if (j.contains("params"))
    for (const auto& [key, val] : j.at("params").items()) params[key] = val.get<double>();
  for (const auto& [key, val] : overrides) {
    if (!params.count(key)) throw Error("map spec has no parameter '" + key + "'");
    params[key] = val;
  }
  const Json& dom = j.at("domain");
  if (!dom.is_array() || dom.size() != 2) throw Error("map spec: domain must be [lo, hi]");
  std::optional<double> fp;
  if (j.contains("fixed_point") && !j.at("fixed_point").is_null()) fp = j.at("fixed_point").get<double>();
  MapSpec m = make_map(j.value("name", std::string("user")), j.at("k").get<int>(), j.at("expr").get<std::string>(),
                       params, dom[0].get<double>(), dom[1].get<double>(), fp);
  m.unbounded_below = j.value("unbounded_below", false);
  m.unbounded_above = j.value("unbounded_above", true);
  m.description = j.value("description", std::string());
  m.constraints = j.value("constraints", std::string());
  validate(m);
  return m;
}

MapSpec load_map(const RunConfig& cfg) {
  const int sources = int(cfg.map_name.has_value()) + int(cfg.spec_path.has_value()) + int(cfg.spec_json.has_value());
  if (sources != 1) throw Error("give exactly one map source (--map or --spec)");
  if (cfg.map_name) return catalogue_entry(*cfg.map_name, cfg.params);
  if (cfg.spec_json) return map_from_json(*cfg.spec_json, cfg.params);
  std::ifstream f(*cfg.spec_path);
  if (!f) throw Error("cannot read map spec '" + *cfg.spec_path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::exception& e) {
    throw Error("map spec '" + *cfg.spec_path + "' is not valid JSON: " + e.what());
  }
  return map_from_json(j, cfg.params);
}

RunConfig config_from_json(const Json& j) {
  static const std::set<std::string> known = {"command", "map", "spec", "spec_path", "params", "expansion",
                                              "grid", "n", "mmax", "seed", "samples", "out", "csv",
                                              "threads", "g", "init", "nmax", "tol"};
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, val] : j.items())
    if (!known.count(key)) throw Error("config: unknown key '" + key + "'");
  RunConfig c;
  try {
    c.command = j.value("command", std::string());
    if (j.contains("map")) c.map_name = j.at("map").get<std::string>();
    if (j.contains("spec")) c.spec_json = j.at("spec");
    if (j.contains("spec_path")) c.spec_path = j.at("spec_path").get<std::string>();
    if (j.contains("params"))
      for (const auto& [key, val] : j.at("params").items()) c.params[key] = val.get<double>();
    c.expansion = j.value("expansion", 0);
    if (j.contains("grid")) c.grid = j.at("grid").get<int>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    c.m_max = j.value("mmax", 64);
    c.seed = j.value("seed", std::uint64_t{1});
    c.samples = j.value("samples", std::size_t{100000});
    c.out = j.value("out", std::string());
    c.csv = j.value("csv", std::string());
    c.threads = j.value("threads", 0);
    c.g = j.value("g", std::string());
    if (j.contains("init")) c.init = j.at("init").get<std::vector<double>>();
    c.n_max = j.value("nmax", std::int64_t{100000});
    c.tol = j.value("tol", 1e-8);
  } catch (const Json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return c;
}

CommandResult cmd_analyze(const RunConfig& cfg) {
  const MapSpec m = load_map(cfg);
  const NormalizedMap nm = normalize(m);
  CertificateOptions opt;
  opt.m_max = cfg.m_max;
  opt.seed = cfg.seed;
  opt.samples = cfg.samples;
  opt.grid_n = cfg.grid.value_or(512);
  const Verdict v = gas_certificate(nm, opt);

  Json r = header("analyze");
  r["map"] = to_json(nm);
  r["certificate"] = to_json(v);
  r["verdict"] = v.verdict;
  Json emb = nullptr;
  std::string emb_note;
  if (nm.k == 2) {
    const MonotonicityProfile prof = monotonicity_profile(nm);
    if (prof.has_mixed())
      emb_note = "mixed monotonicity " + prof.tag();
    else
      emb = to_json(embedding_gas_verdict(nm, prof, cfg.seed));
  } else {
    emb_note = "embedding needs k = 2";
  }
  r["embedding"] = emb;
  r["embedding_note"] = emb_note;
  const int points = cfg.n.value_or(200);
  r["basin"] = points > 0 ? to_json(basin_sample(nm, points, cfg.seed, 1e-6, cfg.n_max)) : Json(nullptr);
  return {r, v.verdict == "Inconclusive" ? 2 : 0};
}

CommandResult cmd_regions(const RunConfig& cfg) {
  const MapSpec m = load_map(cfg);
  require_k2(m, "regions");
  const NormalizedMap fj = normalized_expansion(cfg, m);
  const int n = cfg.n.value_or(cfg.grid.value_or(256));
  const std::string prefix = cfg.out.empty() ? "regions" : cfg.out;
  const auto grid = region_grid(fj, n);
  const auto cy = trace_curve_y_eq_F(fj, n);
  const auto cx = trace_curve_x_eq_F(fj, n);

  std::map<std::string, std::size_t> counts;
  {
    auto f = open_out(prefix + "_grid.csv");
    f << "x,y,value,label\r\n";
    for (const auto& s : grid) {
      f << csv_number(s.x) << ',' << csv_number(s.y) << ',' << csv_number(s.value) << ','
        << csv_field(to_string(s.label)) << "\r\n";
      ++counts[to_string(s.label)];
    }
  }
  for (const auto& [suffix, pts] : {std::pair{"_curve_y_eq_F.csv", &cy}, std::pair{"_curve_x_eq_F.csv", &cx}}) {
    auto f = open_out(prefix + suffix);
    f << "x,y\r\n";
    for (const auto& p : *pts) f << csv_number(p.x) << ',' << csv_number(p.y) << "\r\n";
  }
  Json r = header("regions");
  r["map"] = to_json(fj);
  r["grid_n"] = n;
  r["coordinates"] = "normalized";
  r["label_counts"] = counts;
  r["files"] = {{"grid", prefix + "_grid.csv"},
                {"curve_y_eq_F", prefix + "_curve_y_eq_F.csv"},
                {"curve_x_eq_F", prefix + "_curve_x_eq_F.csv"}};
  r["curve_points"] = {{"y_eq_F", cy.size()}, {"x_eq_F", cx.size()}};
  return {r, 0};
}

CommandResult cmd_catalogue(const RunConfig&) {
  Json list = Json::array();
  for (const auto& m : catalogue()) list.push_back(to_json(m));
  Json r = header("catalogue");
  r["maps"] = list;
  return {r, 0};
}

CommandResult cmd_expand(const RunConfig& cfg) {
  const MapSpec m = load_map(cfg);
  const NormalizedMap fj = normalized_expansion(cfg, m);
  const GradientVector g = gradient(fj);
  Json r = header("expand");
  r["map"] = to_json(fj);
  r["gradient"] = to_json(g);
  r["coefficients"] = to_json(g)["a"];
  r["expression"] = fj.f0.to_string();
  r["slas"] = to_json(slas_index(normalize(m), cfg.m_max));
  return {r, 0};
}

CommandResult cmd_envelope(const RunConfig& cfg) {
  const MapSpec m = load_map(cfg);
  const NormalizedMap fj = normalized_expansion(cfg, m);
  const Box box = grid_box(fj);
  const MonotonicityProfile prof = monotonicity_profile(fj);
  Sampler sampler;
  sampler.n = cfg.samples;
  sampler.seed = cfg.seed;
  const int grid_n = cfg.grid.value_or(512);

  Json r = header("envelope");
  r["map"] = to_json(fj);
  r["profile"] = to_json(prof);
  bool pass = false;
  if (!cfg.g.empty()) {
    const OneDimMap g = user_g(cfg, m, box);
    EnvelopeReport rep = check_definition_envelope(fj, g, sampler);
    pass = rep.definition_check.pass;
    if (fj.k == 2 && prof.args[1].sign == Monotone::Increasing) {
      const EnvelopeReport viaR = check_envelope_via_R(fj, g, grid_n);
      rep.region_check = viaR.region_check;
      rep.grid_n = viaR.grid_n;
      rep.theorem_route = "Th-MT1";
    }
    const TwoCycleReport cyc = find_two_cycles(g);
    bool nd = false;
    const double gp = g.derivative(1.0, &nd);
    r["envelope"] = to_json(rep);
    r["g_cycles"] = to_json(cyc);
    r["g_prime"] = nd ? Json(nullptr) : Json(gp);
  } else if (fj.k == 2 && prof.is({Monotone::Increasing, Monotone::Decreasing})) {
    const ImplicitPhi ip = phi_from_implicit(fj);
    const EnvelopeReport rep = check_envelope_incr_decr(fj, ip.phi, grid_n, sampler);
    pass = rep.precondition.pass && rep.definition_check.pass;
    const OneDimMap g = g_from_phi(fj, ip.phi);
    r["envelope"] = to_json(rep);
    r["phi"] = {{"knots", ip.knots.size()},
                {"slope_at_one", ip.slope_at_one},
                {"expected_slope", ip.expected_slope},
                {"domain", {ip.phi.lo, ip.phi.hi}}};
    r["g_cycles"] = to_json(find_two_cycles(g));
    r["g_prime"] = g_prime_at_fixed_point(g);
  } else {
    throw Error("envelope: give --g for a map with monotonicity " + prof.tag());
  }
  r["pass"] = pass;
  return {r, pass ? 0 : 2};
}

CommandResult cmd_embed(const RunConfig& cfg) {
  const MapSpec m = load_map(cfg);
  require_k2(m, "embed");
  const NormalizedMap fj = normalized_expansion(cfg, m);
  const MonotonicityProfile prof = monotonicity_profile(fj);
  if (prof.has_mixed()) throw Error("embed: argument monotonicity is mixed " + prof.tag());
  const int grid_n = cfg.grid.value_or(256);
  const EmbeddingVerdict v = embedding_gas_verdict(fj, prof, cfg.seed, 100, grid_n);
  Json r = header("embed");
  r["map"] = to_json(fj);
  r["profile"] = to_json(prof);
  r["embedding"] = to_json(v);
  if (!cfg.csv.empty()) {
    const OmegaReport om = embedding_region_omega(fj, prof, grid_n);
    auto f = open_out(cfg.csv);
    f << "x,y,in_omega\r\n";
    for (const auto& p : om.points) f << csv_number(p.x) << ',' << csv_number(p.y) << ',' << (p.in_omega ? 1 : 0) << "\r\n";
    r["omega_csv"] = cfg.csv;
  }
  return {r, v.certified ? 0 : 2};
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  const MapSpec m = load_map(cfg);
  const NormalizedMap fj = normalized_expansion(cfg, m);
  if (cfg.init.empty() && !cfg.n) throw Error("simulate: give --init values or --n for a basin sample");
  Json r = header("simulate");
  r["map"] = to_json(fj);
  r["orbit"] = nullptr;
  r["basin"] = nullptr;
  if (!cfg.init.empty()) {
    std::vector<double> init;
    for (double v : cfg.init) init.push_back(v / fj.xbar);
    OrbitOptions opt;
    opt.n_max = cfg.n_max;
    opt.tol = cfg.tol;
    const OrbitResult o = iterate(fj, init, opt);
    r["orbit"] = to_json(o, fj.xbar);
    if (!cfg.csv.empty()) {
      auto f = open_out(cfg.csv);
      f << "n,y\r\n";
      for (const auto& s : o.trajectory) f << s.n << ',' << csv_number(s.y * fj.xbar) << "\r\n";
      r["trajectory_csv"] = cfg.csv;
    }
  }
  if (cfg.n) r["basin"] = to_json(basin_sample(fj, *cfg.n, cfg.seed, 1e-6, cfg.n_max));
  return {r, 0};
}

CommandResult run_command(const RunConfig& cfg) {
  set_thread_limit(cfg.threads);
  if (cfg.command == "analyze") return cmd_analyze(cfg);
  if (cfg.command == "regions") return cmd_regions(cfg);
  if (cfg.command == "catalogue") return cmd_catalogue(cfg);
  if (cfg.command == "expand") return cmd_expand(cfg);
  if (cfg.command == "envelope") return cmd_envelope(cfg);
  if (cfg.command == "embed") return cmd_embed(cfg);
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  throw Error("unknown command '" + cfg.command + "'");
}

Json error_envelope(const std::exception& e) {
  std::string hint = "run with --help for usage";
  const std::string msg = e.what();
  if (const auto* pe = dynamic_cast<const ParseError*>(&e))
    hint = "expression syntax error at byte offset " + std::to_string(pe->offset());
  else if (dynamic_cast<const DomainError*>(&e))
    hint = "an evaluation left the domain; check parameters, domain and initial values";
  else if (msg.find("unknown catalogue map") != std::string::npos)
    hint = "run 'gascert catalogue' to list the built-in maps";
  else if (msg.find("parameter") != std::string::npos)
    hint = "parameters are given as --param name=value";
  return {{"error", msg}, {"hint", hint}};
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global stability certificates for delay difference equations", "gascert"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::string> params;
  std::string map_name, spec_path;
  int grid = 0, n = -1;

  auto common = [&](CLI::App* sub, bool needs_map) {
    if (needs_map) {
      auto* o1 = sub->add_option("--map", map_name, "catalogue map name");
      auto* o2 = sub->add_option("--spec", spec_path, "map spec JSON file");
      o1->excludes(o2);
      sub->add_option("--param", params, "parameter override name=value (repeatable)");
      sub->add_option("--expansion", cfg.expansion, "expansion index j");
      sub->add_option("--grid", grid, "grid resolution");
      sub->add_option("--n", n, "grid size (regions) or number of basin orbits");
      sub->add_option("--mmax", cfg.m_max, "largest expansion index tried");
      sub->add_option("--samples", cfg.samples, "definition-check sample count");
      sub->add_option("--csv", cfg.csv, "CSV output path");
      sub->add_option("--g", cfg.g, "enveloping map in u1");
      sub->add_option("--init", cfg.init, "initial history, newest first, original coordinates")->delimiter(',');
      sub->add_option("--nmax", cfg.n_max, "orbit step limit");
      sub->add_option("--tol", cfg.tol, "orbit convergence tolerance");
    }
    sub->add_option("--seed", cfg.seed, "sampler seed");
    sub->add_option("--out", cfg.out, "output path (regions: file prefix)");
    sub->add_option("--threads", cfg.threads, "worker thread cap, 0 for all cores");
  };
  common(app.add_subcommand("analyze", "full certificate pipeline"), true);
  common(app.add_subcommand("regions", "region grid and implicit curves as CSV"), true);
  common(app.add_subcommand("catalogue", "list built-in maps"), false);
  common(app.add_subcommand("expand", "expansion F_j and its gradient"), true);
  common(app.add_subcommand("envelope", "enveloping checks for a given or implicit g"), true);
  common(app.add_subcommand("embed", "embedding verdict and Omega grid"), true);
  common(app.add_subcommand("simulate", "orbit iteration and basin sampling"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << Json{{"error", e.what()}, {"hint", "run with --help for usage"}}.dump() << "\n";
    return 1;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!map_name.empty()) cfg.map_name = map_name;
    if (!spec_path.empty()) cfg.spec_path = spec_path;
    for (const auto& p : params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw Error("--param expects name=value, got '" + p + "'");
      std::size_t used = 0;
      const std::string val = p.substr(eq + 1);
      double v = 0;
      try {
        v = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != val.size()) throw Error("--param value is not a number: '" + p + "'");
      cfg.params[p.substr(0, eq)] = v;
    }
    if (grid > 0) cfg.grid = grid;
    if (n >= 0) cfg.n = n;
    const CommandResult res = run_command(cfg);
    const std::string text = res.report.dump(2) + "\n";
    out << text;
    if (!cfg.out.empty() && cfg.command != "regions") open_out(cfg.out) << text;
    return res.exit_code;
  } catch (const std::exception& e) {
    err << error_envelope(e).dump() << "\n";
    return 1;
  }
}

}  // namespace gascert
