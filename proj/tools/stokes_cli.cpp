#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "report.hpp"

using namespace stokes;
using namespace stokes::cli;

namespace {

constexpr int kOk = 0, kParse = 2, kNumeric = 3, kTruncated = 4;

struct Common {
  std::string poly;
  int random_degree = 0;
  double t = 0.0;
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, bool needs_poly = true) {
  if (needs_poly) {
    sub->add_option("--poly", c.poly, "coefficients, highest degree first, e.g. \"1,0,-1\" or \"1,0,2+1i\"");
    sub->add_option("--random", c.random_degree, "use a random monic centered polynomial of this degree")
        ->check(CLI::Range(1, 40));
    sub->add_option("--t", c.t, "rotation parameter: work with exp(2it) P");
  }
  sub->add_option("--config", c.config, "JSON run configuration");
  sub->add_option("--out", c.out, "directory for output files");
  sub->add_option("--format", c.format, "comma separated subset of json,svg,csv");
  sub->add_option("--seed", c.seed, "seed for randomized inputs");
}

RunConfig effective_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (!c.format.empty()) {
    cfg.formats.clear();
    std::stringstream ss(c.format);
    for (std::string f; std::getline(ss, f, ',');)
      if (!f.empty()) cfg.formats.push_back(f);
  }
  cfg.validate();
  return cfg;
}

ComplexPolynomial input_polynomial(const Common& c, const RunConfig& cfg) {
  if (!c.poly.empty() && c.random_degree > 0) throw Error(ErrorKind::Parse, "give either --poly or --random");
  if (!c.poly.empty()) {
    try {
      return parse_polynomial(c.poly).rotated(c.t);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw;
      throw Error(ErrorKind::Parse, e.what());
    }
  }
  if (c.random_degree > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> rs;
    while (static_cast<int>(rs.size()) < c.random_degree) {
      const cplx z(u(rng), u(rng));
      if (std::abs(z) <= 1.0) rs.push_back(z);
    }
    cplx mean = 0.0;
    for (auto r : rs) mean += r;
    mean /= static_cast<double>(rs.size());
    for (auto& r : rs) r -= mean;
    return from_roots(rs).rotated(c.t);
  }
  throw Error(ErrorKind::Parse, "a polynomial is required (--poly or --random)");
}

json envelope(const std::string& command, const RunConfig& cfg) {
  return json{{"command", command}, {"config", to_json(cfg)}};
}

json input_json(const ComplexPolynomial& p) {
  return {{"coefficients", polynomial_json(p)}, {"t", p.rotation()}, {"degree", p.degree()}};
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& body) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + name);
  out << body;
}

/// JSON always goes to stdout; files only when an output directory is set.
void emit(const RunConfig& cfg, const std::string& stem, const json& report, const std::string& svg,
          const std::string& csv) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (cfg.out_dir.empty()) return;
  if (cfg.wants("json")) write_file(cfg, stem + ".json", text);
  if (cfg.wants("svg") && !svg.empty()) write_file(cfg, stem + ".svg", svg);
  if (cfg.wants("csv") && !csv.empty()) write_file(cfg, stem + ".csv", csv);
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(s);
      return {n, n};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "bad index range '" + s + "', expected a..b");
  }
}

std::vector<double> parse_list(const std::string& s, std::size_t n, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  try {
    for (std::string f; std::getline(ss, f, ',');) v.push_back(std::stod(f));
  } catch (const std::exception&) {
    v.clear();
  }
  if (v.size() != n) throw Error(ErrorKind::Parse, "bad " + what + " '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------

int cmd_roots(const Common& c) {
  const auto cfg = effective_config(c);
  const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
  json rep = envelope("roots", cfg);
  rep["input"] = input_json(p.poly);
  rep["result"] = roots_json(p);
  Csv csv({"index", "re", "im", "multiplicity"});
  for (int k = 0; k < p.turning_points.size(); ++k)
    csv.row({std::to_string(k), csv_number(p.turning_points[k].location.real()),
             csv_number(p.turning_points[k].location.imag()), std::to_string(p.turning_points[k].multiplicity)});
  emit(cfg, "roots", rep, "", csv.str());
  return kOk;
}

int cmd_stokes_graph(const Common& c) {
  const auto cfg = effective_config(c);
  const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
  const auto g = build_stokes_graph(p, cfg.trace());
  json rep = envelope("stokes-graph", cfg);
  rep["input"] = input_json(p.poly);
  rep["result"] = graph_json(g);
  if (g.complete) {
    try {
      rep["result"]["domains"] = domains_json(admissible_domains(g));
    } catch (const Error& e) {
      rep["result"]["domains_error"] = e.what();
    }
  }
  Csv csv({"edge", "origin", "direction", "fate", "target", "ray", "arc_length"});
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    csv.row({std::to_string(k), std::to_string(e.origin), csv_number(e.direction), to_string(e.fate.kind),
             std::to_string(e.fate.target), std::to_string(e.fate.ray), csv_number(e.fate.arc_length)});
  }
  emit(cfg, "stokes_graph", rep, graph_svg(g), csv.str());
  return g.complete ? kOk : kTruncated;
}

int cmd_geodesics(const Common& c) {
  const auto cfg = effective_config(c);
  const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
  const auto rep_g = enumerate_short_geodesics(p, cfg.geodesics());
  json rep = envelope("geodesics", cfg);
  rep["input"] = input_json(p.poly);
  rep["result"] = geodesic_report_json(rep_g);
  Csv csv({"a", "b", "t_star", "period_re", "period_im"});
  for (const auto& g : rep_g.geodesics)
    csv.row({std::to_string(g.a), std::to_string(g.b), csv_number(g.t_star), csv_number(g.period.real()),
             csv_number(g.period.imag())});
  emit(cfg, "geodesics", rep, "", csv.str());
  return rep_g.non_generic() ? kNumeric : kOk;
}

int cmd_rays(const Common& c) {
  const auto cfg = effective_config(c);
  const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
  const auto geo = enumerate_short_geodesics(p, cfg.geodesics());
  const auto rays = accumulation_rays(p, geo, cfg.spectrum());
  json a = json::array();
  Csv csv({"angle", "a", "b", "loop_re", "loop_im"});
  for (const auto& r : rays) {
    a.push_back({{"angle", r.angle}, {"a", r.geodesic.a}, {"b", r.geodesic.b}, {"loop_period", cjson(r.loop_period)}});
    csv.row({csv_number(r.angle), std::to_string(r.geodesic.a), std::to_string(r.geodesic.b),
             csv_number(r.loop_period.real()), csv_number(r.loop_period.imag())});
  }
  json rep = envelope("rays", cfg);
  rep["input"] = input_json(p.poly);
  rep["result"] = {{"rays", a}, {"errors", geo.errors}};
  emit(cfg, "rays", rep, "", csv.str());
  return geo.non_generic() ? kNumeric : kOk;
}

struct EigenArgs {
  std::string n = "0..10";
  int order = 0;
  int ray = -1;
  std::string search;
  std::string sectors;
  int cells = 8;
};

int cmd_eigenvalues(const Common& c, const EigenArgs& ea) {
  const auto cfg = effective_config(c);
  const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
  const auto [n_min, n_max] = parse_range(ea.n);
  const auto rays = accumulation_rays(p, enumerate_short_geodesics(p, cfg.geodesics()), cfg.spectrum());
  if (ea.ray >= static_cast<int>(rays.size())) throw Error(ErrorKind::Domain, "no such ray");
  json out = json::array();
  Csv csv({"ray", "n", "re", "im", "residual", "converged"});
  for (std::size_t r = 0; r < rays.size(); ++r) {
    if (ea.ray >= 0 && static_cast<int>(r) != ea.ray) continue;
    for (const auto& e : eigenvalue_asymptotics(p, rays[r], n_min, n_max, ea.order, cfg.spectrum())) {
      out.push_back({{"ray", r}, {"ray_angle", e.ray_angle}, {"n", e.n}, {"value", cjson(e.value)},
                     {"order", e.order}, {"residual", e.residual}, {"iterations", e.iterations},
                     {"converged", e.converged}, {"monotone", e.monotone}});
      csv.row({std::to_string(r), std::to_string(e.n), csv_number(e.value.real()), csv_number(e.value.imag()),
               csv_number(e.residual), e.converged ? "1" : "0"});
    }
  }
  json rep = envelope("eigenvalues", cfg);
  rep["input"] = input_json(p.poly);
  rep["input"]["n"] = {n_min, n_max};
  rep["input"]["order"] = ea.order;
  rep["result"] = {{"asymptotic", out}};
  if (!ea.search.empty()) {
    const auto box = parse_list(ea.search, 4, "search rectangle");
    const auto sec = parse_list(ea.sectors.empty() ? std::string("0,2") : ea.sectors, 2, "sector pair");
    const auto res = wronskian_eigenvalue_search(p, static_cast<int>(sec[0]), static_cast<int>(sec[1]),
                                                 {box[0], box[1], box[2], box[3]}, ea.cells);
    json zs = json::array();
    for (cplx z : res.zeros) zs.push_back(cjson(z));
    rep["input"]["search"] = box;
    rep["input"]["sectors"] = {static_cast<int>(sec[0]), static_cast<int>(sec[1])};
    rep["result"]["wronskian_zeros"] = zs;
    rep["result"]["wronskian_evaluations"] = res.evaluations;
  }
  emit(cfg, "eigenvalues", rep, "", csv.str());
  return kOk;
}

int cmd_strip_realize(const Common& c, const std::vector<int>& dk) {
  const auto cfg = effective_config(c);
  json rep = envelope("strip-realize", cfg);
  ChoppedStrip s;
  if (!c.poly.empty() || c.random_degree > 0) {
    const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
    const auto vf = is_very_flat(p, cfg.trace());
    rep["input"] = input_json(p.poly);
    rep["result"] = {{"very_flat", vf.very_flat}};
    if (!vf.very_flat) {
      rep["result"]["reason"] = vf.reason;
      emit(cfg, "strip", rep, "", "");
      return kOk;
    }
    s = *vf.strip;
    json xi = json::array();
    for (cplx z : vf.node_xi) xi.push_back(cjson(z));
    rep["result"]["node_roots"] = vf.node_roots;
    rep["result"]["node_xi"] = xi;
  } else {
    if (dk.size() != 2) throw Error(ErrorKind::Parse, "strip-realize needs D K or a polynomial");
    const int d = dk[0], k = dk[1];
    if (d < 2 || k < d - 1 || k > d * (d - 1) / 2)
      throw Error(ErrorKind::Parse, "need D >= 2 and D-1 <= K <= D(D-1)/2");
    s = realize_count(dk[0], dk[1]);
    rep["input"] = {{"d", dk[0]}, {"k", dk[1]}};
    rep["result"] = json::object();
  }
  const auto vis = visible_pairs(s);
  rep["result"]["strip"] = strip_json(s);
  json pairs = json::array();
  for (auto [i, j] : vis.pairs) pairs.push_back(json::array({i, j}));
  rep["result"]["visible_pairs"] = pairs;
  rep["result"]["count"] = vis.count();
  rep["result"]["ties"] = vis.ties.size();
  Csv csv({"node", "x", "y", "cut"});
  for (int k = 0; k < s.size(); ++k)
    csv.row({std::to_string(k), std::to_string(s.nodes[k].x), std::to_string(s.nodes[k].y), to_string(s.cuts[k])});
  emit(cfg, "strip", rep, strip_svg(s), csv.str());
  return kOk;
}

int cmd_chords(const Common& c) {
  const auto cfg = effective_config(c);
  const auto p = Potential::from(input_polynomial(c, cfg), cfg.roots());
  const auto g = build_stokes_graph(p, cfg.trace());
  const auto ga = build_stokes_graph(p.rotated(pi / 2), cfg.trace());
  json rep = envelope("chords", cfg);
  rep["input"] = input_json(p.poly);
  if (!g.complete || !ga.complete) {
    rep["result"] = {{"complete", false}};
    emit(cfg, "chords", rep, "", "");
    return kTruncated;
  }
  const auto st = strip_chords(g), anti = strip_chords(ga);
  rep["result"] = {{"stokes", chords_json(st)}, {"anti_stokes", chords_json(anti)}};
  Csv csv({"graph", "a", "b", "weight"});
  for (const auto* cd : {&st, &anti})
    for (const auto& ch : cd->chords)
      csv.row({cd == &st ? "stokes" : "anti-stokes", std::to_string(ch.a), std::to_string(ch.b),
               csv_number(ch.weight)});
  emit(cfg, "chords", rep, chords_svg(st, anti), csv.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes graphs, short geodesics and spectral asymptotics of polynomial quadratic differentials"};
  app.require_subcommand(1);

  Common c;
  EigenArgs ea;
  std::vector<int> dk;
  auto* roots = app.add_subcommand("roots", "roots with multiplicities and Stokes sectors");
  auto* graph = app.add_subcommand("stokes-graph", "Stokes graph of exp(2it) P");
  auto* geo = app.add_subcommand("geodesics", "short geodesics (finite Stokes lines over all rotations)");
  auto* rays = app.add_subcommand("rays", "eigenvalue accumulation rays");
  auto* eig = app.add_subcommand("eigenvalues", "asymptotic eigenvalues, optionally a Wronskian search");
  auto* strip = app.add_subcommand("strip-realize", "chopped strip with K visible pairs, or the strip of a very flat P");
  auto* chords = app.add_subcommand("chords", "weighted chord diagrams of the Stokes and anti-Stokes graphs");
  for (auto* s : {roots, graph, geo, rays, eig, chords}) add_common(s, c);
  add_common(strip, c);
  strip->add_option("dk", dk, "D K")->expected(0, 2);
  eig->add_option("--n", ea.n, "index range a..b");
  eig->add_option("--order", ea.order, "number of correction terms");
  eig->add_option("--ray", ea.ray, "only this ray");
  eig->add_option("--search", ea.search, "Wronskian search rectangle re_min,re_max,im_min,im_max");
  eig->add_option("--sectors", ea.sectors, "sector pair for the search, default 0,2");
  eig->add_option("--cells", ea.cells, "grid cells along the real direction")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*roots) return cmd_roots(c);
    if (*graph) return cmd_stokes_graph(c);
    if (*geo) return cmd_geodesics(c);
    if (*rays) return cmd_rays(c);
    if (*eig) return cmd_eigenvalues(c, ea);
    if (*strip) return cmd_strip_realize(c, dk);
    if (*chords) return cmd_chords(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Parse ? kParse : kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kParse;
}
