#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "stokes/strips.hpp"

namespace stokes::cli {

inline json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

inline json polyline_json(const Polyline& line) {
  json a = json::array();
  for (cplx z : line) a.push_back(cjson(z));
  return a;
}

inline json polynomial_json(const ComplexPolynomial& p) {
  json a = json::array();
  for (cplx c : p.base_coefficients()) a.push_back(cjson(c));
  return a;
}

inline json fate_json(const TrajectoryFate& f) {
  json j{{"kind", to_string(f.kind)}, {"arc_length", f.arc_length}};
  if (f.kind == FateKind::HitTurningPoint) {
    j["target"] = f.target;
    j["distance"] = f.distance;
  } else if (f.kind == FateKind::EscapedToRay) {
    j["ray"] = f.ray;
    j["asymptotic_angle"] = f.asymptotic_angle;
  }
  return j;
}

inline json roots_json(const Potential& p) {
  json rs = json::array();
  for (const auto& tp : p.turning_points.points)
    rs.push_back({{"z", cjson(tp.location)}, {"multiplicity", tp.multiplicity}});
  const auto sec = stokes_sectors(p.poly);
  json sectors = json::array();
  for (const auto& s : sec.sectors) sectors.push_back({{"center", s.center}, {"half_width", s.half_width}});
  return {{"roots", rs}, {"sectors", sectors}, {"rays", sec.ray_angles}};
}

inline json graph_json(const StokesGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges) {
    json j{{"origin", e.origin}, {"direction", e.direction}, {"fate", fate_json(e.fate)}};
    if (e.finite()) j["one_sided"] = e.one_sided;
    j["polyline"] = polyline_json(e.polyline);
    edges.push_back(std::move(j));
  }
  json cx = json::array();
  const auto kinds = classify_complexes(g);
  for (std::size_t k = 0; k < g.complexes.size(); ++k)
    cx.push_back({{"turning_points", g.complexes[k]}, {"kind", to_string(kinds[k])}});
  return {{"complete", g.complete},
          {"escape_radius", g.scales.escape_radius},
          {"half_lines", g.half_lines},
          {"finite_edges", g.finite_edge_count()},
          {"escaping_edges", g.escaping_edge_count()},
          {"rays", g.rays},
          {"complexes", cx},
          {"edges", edges},
          {"warnings", g.warnings}};
}

inline json domains_json(const std::vector<AdmissibleDomain>& doms) {
  json a = json::array();
  for (const auto& d : doms) {
    json j{{"kind", to_string(d.kind)}, {"rays", d.rays}, {"turning_points", d.turning_points},
           {"boundary_edges", d.boundary_edges}};
    if (d.kind == DomainKind::Strip) j["width"] = d.width;
    a.push_back(std::move(j));
  }
  return a;
}

inline json geodesic_json(const ShortGeodesic& g) {
  return {{"a", g.a}, {"b", g.b}, {"t_star", g.t_star}, {"period", cjson(g.period)},
          {"polyline", polyline_json(g.polyline)}};
}

inline json geodesic_report_json(const GeodesicReport& rep) {
  json gs = json::array();
  for (const auto& g : rep.geodesics) gs.push_back(geodesic_json(g));
  json pairs = json::array();
  for (const auto& v : rep.pairs) {
    json j{{"a", v.a}, {"b", v.b}, {"t_candidate", v.t_candidate}, {"status", to_string(v.status)}};
    if (v.status == GeodesicStatus::Verified) {
      j["t_star"] = v.geodesic.t_star;
      j["direct"] = v.direct;
      j["bisections"] = v.bisections;
    } else {
      j["message"] = v.message;
    }
    pairs.push_back(std::move(j));
  }
  return {{"count", rep.count()}, {"geodesics", gs}, {"pairs", pairs}, {"errors", rep.errors},
          {"warnings", rep.warnings}};
}

inline json strip_json(const ChoppedStrip& s) {
  json nodes = json::array(), cuts = json::array();
  for (const auto& n : s.nodes) nodes.push_back(json::array({n.x, n.y}));
  for (std::size_t k = 1; k + 1 < s.cuts.size(); ++k) cuts.push_back(to_string(s.cuts[k]));
  return {{"nodes", nodes}, {"cuts", cuts}};
}

inline json chords_json(const ChordDiagram& cd) {
  json a = json::array();
  for (const auto& c : cd.chords) a.push_back({{"a", c.a}, {"b", c.b}, {"weight", c.weight}});
  return {{"n_vertices", cd.n_vertices}, {"chords", a}, {"valid", valid_chord_diagram(cd)}};
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << "\n";
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// SVG

/// Maps a world box onto a square panel, y up.
class Svg {
 public:
  Svg(int panels, double size) : panels_(panels), size_(size) {}

  void set_view(int panel, double xmin, double xmax, double ymin, double ymax) {
    panel_ = panel;
    const double span = std::max(xmax - xmin, ymax - ymin);
    scale_ = (size_ - 2 * margin_) / (span > 0 ? span : 1.0);
    ox_ = panel * size_ + margin_ + 0.5 * ((size_ - 2 * margin_) - scale_ * (xmax - xmin)) - scale_ * xmin;
    oy_ = margin_ + 0.5 * ((size_ - 2 * margin_) + scale_ * (ymax - ymin)) + scale_ * ymin;
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    body_ << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k)
      body_ << (k ? " " : "") << fmt(X(pts[k].first)) << "," << fmt(Y(pts[k].second));
    body_ << "\"/>\n";
  }

  void polyline(const Polyline& line, const std::string& style, std::size_t max_points = 400) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t stride = std::max<std::size_t>(1, line.size() / max_points);
    for (std::size_t k = 0; k < line.size(); k += stride) pts.emplace_back(line[k].real(), line[k].imag());
    if (!line.empty() && (line.size() - 1) % stride != 0) pts.emplace_back(line.back().real(), line.back().imag());
    polyline(pts, style);
  }

  void circle(double x, double y, double r_world, const std::string& style) {
    body_ << "<circle cx=\"" << fmt(X(x)) << "\" cy=\"" << fmt(Y(y)) << "\" r=\"" << fmt(r_world * scale_) << "\" "
          << style << "/>\n";
  }

  void dot(double x, double y, double r_px, const std::string& fill) {
    body_ << "<circle cx=\"" << fmt(X(x)) << "\" cy=\"" << fmt(Y(y)) << "\" r=\"" << fmt(r_px) << "\" fill=\"" << fill
          << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12) {
    body_ << "<text x=\"" << fmt(X(x) + 4) << "\" y=\"" << fmt(Y(y) - 4) << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  }

  void caption(const std::string& s) {
    body_ << "<text x=\"" << fmt(panel_ * size_ + margin_) << "\" y=\"" << fmt(size_ - 8)
          << "\" font-size=\"13\" font-family=\"sans-serif\">" << s << "</text>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(panels_ * size_) << "\" height=\""
        << fmt(size_) << "\" viewBox=\"0 0 " << fmt(panels_ * size_) << " " << fmt(size_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

 private:
  double X(double x) const { return ox_ + scale_ * x; }
  double Y(double y) const { return oy_ - scale_ * y; }

  int panels_;
  double size_;
  double margin_ = 24.0;
  int panel_ = 0;
  double scale_ = 1.0, ox_ = 0.0, oy_ = 0.0;
  std::ostringstream body_;
};

inline std::string graph_svg(const StokesGraph& g) {
  Svg svg(1, 640);
  const double R = 1.05 * g.scales.escape_radius;
  svg.set_view(0, -R, R, -R, R);
  svg.circle(0, 0, g.scales.escape_radius, "fill=\"none\" stroke=\"#bbb\" stroke-dasharray=\"4 4\"");
  for (const auto& e : g.edges) {
    const std::string style = e.finite()     ? "stroke=\"#c0392b\" stroke-width=\"2\""
                              : e.escaping() ? "stroke=\"#2c3e50\" stroke-width=\"1.2\""
                                             : "stroke=\"#e67e22\" stroke-dasharray=\"3 3\"";
    svg.polyline(e.polyline, style);
  }
  for (const auto& tp : g.turning_points().points) svg.dot(tp.location.real(), tp.location.imag(), 4, "black");
  svg.caption("Stokes graph, t = " + Svg::fmt(g.potential.poly.rotation()));
  return svg.str();
}

/// Two panels: the chopped strip with its cuts, and the same strip with the visible segments.
inline std::string strip_svg(const ChoppedStrip& s) {
  Svg svg(2, 480);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& n : s.nodes) {
    xmin = std::min(xmin, double(n.x));
    xmax = std::max(xmax, double(n.x));
    ymin = std::min(ymin, double(n.y));
    ymax = std::max(ymax, double(n.y));
  }
  const double pad = 0.15 * std::max(xmax - xmin, ymax - ymin);
  const double top = ymax + pad, bottom = ymin - pad;
  const auto vis = visible_pairs(s);
  for (int panel = 0; panel < 2; ++panel) {
    svg.set_view(panel, xmin - pad, xmax + pad, bottom, top);
    svg.polyline(std::vector<std::pair<double, double>>{{xmin - pad, top}, {xmax + pad, top}}, "stroke=\"black\"");
    svg.polyline(std::vector<std::pair<double, double>>{{xmin - pad, bottom}, {xmax + pad, bottom}}, "stroke=\"black\"");
    if (panel == 1)
      for (auto [i, j] : vis.pairs)
        svg.polyline(std::vector<std::pair<double, double>>{{double(s.nodes[i].x), double(s.nodes[i].y)},
                                                            {double(s.nodes[j].x), double(s.nodes[j].y)}},
                     "stroke=\"#2980b9\" stroke-width=\"1.5\"");
    for (std::size_t k = 0; k < s.nodes.size(); ++k) {
      const double x = double(s.nodes[k].x), y = double(s.nodes[k].y);
      if (s.cuts[k] != Cut::None)
        svg.polyline(std::vector<std::pair<double, double>>{{x, y}, {x, s.cuts[k] == Cut::Up ? top : bottom}},
                     "stroke=\"#c0392b\" stroke-width=\"2\"");
      svg.dot(x, y, 4, "black");
    }
    svg.caption(panel == 0 ? "chopped strip" : std::to_string(vis.count()) + " short geodesics");
  }
  return svg.str();
}

inline std::string chords_svg(const ChordDiagram& st, const ChordDiagram& anti) {
  Svg svg(2, 420);
  int panel = 0;
  for (const auto* cd : {&st, &anti}) {
    svg.set_view(panel, -1.2, 1.2, -1.2, 1.2);
    const int n = cd->n_vertices;
    auto vertex = [&](int k) { return std::polar(1.0, 2 * pi * k / n); };
    std::vector<std::pair<double, double>> ring;
    for (int k = 0; k <= n; ++k) ring.emplace_back(vertex(k % n).real(), vertex(k % n).imag());
    svg.polyline(ring, "stroke=\"#999\"");
    for (const auto& c : cd->chords) {
      const cplx a = vertex(c.a), b = vertex(c.b);
      svg.polyline(std::vector<std::pair<double, double>>{{a.real(), a.imag()}, {b.real(), b.imag()}},
                   "stroke=\"#2980b9\" stroke-width=\"2\"");
      const cplx m = 0.5 * (a + b);
      svg.text(m.real(), m.imag(), Svg::fmt(c.weight), 11);
    }
    for (int k = 0; k < n; ++k) {
      svg.dot(vertex(k).real(), vertex(k).imag(), 4, "black");
      svg.text(1.08 * vertex(k).real(), 1.08 * vertex(k).imag(), std::to_string(k));
    }
    svg.caption(panel == 0 ? "Stokes" : "anti-Stokes");
    ++panel;
  }
  return svg.str();
}

}  // namespace stokes::cli
