// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "stokes/spectrum.hpp"
#include "stokes/strips.hpp"

using namespace stokes;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs > limit_s) {
    o.pass = false;
    o.detail += " [over time limit]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.2f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
              limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Potential pot(std::initializer_list<cplx> c) { return Potential::from(ComplexPolynomial(std::vector<cplx>(c))); }

double circ_dist_pi(double a, double b) {
  const double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

// monic, centered, roots uniform in the disc of radius 1.5, pairwise >= 0.05 apart
Potential random_potential(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    std::vector<cplx> rs;
    while (static_cast<int>(rs.size()) < d) {
      const cplx z(u(rng), u(rng));
      if (std::abs(z) <= 1.5) rs.push_back(z);
    }
    cplx mean = 0.0;
    for (auto r : rs) mean += r;
    mean /= static_cast<double>(d);
    for (auto& r : rs) r -= mean;
    bool ok = true;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) ok = ok && std::abs(rs[i] - rs[j]) >= 0.05;
    if (ok) return Potential::from(from_roots(rs));
  }
}

// traces behind criteria 2 and 3, kept for the drift check
std::vector<std::pair<Potential, double>> traced_rotations;

double graph_drift(const Potential& p, int& traces) {
  double worst = 0.0;
  const auto g = build_stokes_graph(p);
  for (const auto& e : g.edges) {
    if (e.fate.kind == FateKind::Truncated) continue;
    Trace tr;
    tr.origin = e.origin;
    tr.points = e.polyline;
    tr.branch = e.branch;
    tr.fate = e.fate;
    worst = std::max(worst, re_xi_drift(p, tr) / (1.0 + e.fate.arc_length));
    ++traces;
  }
  return worst;
}

}  // namespace

int main() {
  run(1, "harmonic oscillator spectrum", 60, [] {
    const auto p = pot({1, 0, -1});
    const auto rays = accumulation_rays(p);
    if (rays.size() != 1) return Outcome{false, std::to_string(rays.size()) + " rays"};
    double worst = 0.0;
    for (const auto& e : eigenvalue_asymptotics(p, rays[0], 10, 50, 0))
      worst = std::max(worst, std::abs(e.value - cplx(2.0 * e.n + 1)));
    const auto res = wronskian_eigenvalue_search(p, 0, 2, {0.5, 7.5, -1, 1}, 7);
    double zerr = res.zeros.size() == 4 ? 0.0 : 1e300;
    for (std::size_t k = 0; k < res.zeros.size() && k < 4; ++k)
      zerr = std::max(zerr, std::abs(res.zeros[k] - cplx(2.0 * k + 1)));
    return Outcome{worst <= 0.05 && zerr <= 1e-6, "max |lambda_n - (2n+1)| over n = 10..50 is " + fmt("%.2e", worst) +
                                                      ", " + std::to_string(res.zeros.size()) +
                                                      " Wronskian zeros, max error " + fmt("%.2e", zerr)};
  });

  run(2, "accumulation rays", 120, [] {
    const auto p2 = pot({1, 0, -1});
    const auto r2 = accumulation_rays(p2);
    traced_rotations.push_back({p2, 0.0});
    const bool one = r2.size() == 1 && circ_dist_pi(r2[0].angle, 0.0) <= 1e-8;

    const auto p3 = pot({1, 0, 0, -1});
    const auto r3 = accumulation_rays(p3);
    bool three = r3.size() == 3;
    if (three)
      for (std::size_t k = 0; k < 3; ++k) {
        three = three && std::abs(circ_dist_pi(r3[(k + 1) % 3].angle, r3[k].angle) - pi / 3) <= 1e-6;
        traced_rotations.push_back({p3, r3[k].angle});
      }

    const auto q = Potential::from(from_roots({cplx(0.9, 0.2), cplx(-0.7, 0.5), cplx(-0.2, -0.7)}));
    const auto base = accumulation_rays(q);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, pi);
    double worst = 0.0;
    bool counts = true;
    for (int i = 0; i < 20; ++i) {
      const double s = u(rng);
      const auto rot = accumulation_rays(q.rotated(s));
      counts = counts && rot.size() == base.size();
      for (const auto& r : base) {
        double best = 1e300;
        for (const auto& x : rot) best = std::min(best, circ_dist_pi(x.angle, r.angle - s));
        worst = std::max(worst, best);
      }
    }
    return Outcome{one && three && counts && worst <= 1e-8,
                   std::string("z^2-1 ") + (one ? "one ray at 0" : "wrong") + ", z^3-1 " +
                       (three ? "three rays pi/3 apart" : "wrong") + ", rotation error " + fmt("%.2e", worst)};
  });

  run(3, "counting bounds", 900, [] {
    std::mt19937_64 rng(12345);
    int runs = 0, non_generic = 0, out_of_bounds = 0, doubled = 0;
    for (int d = 3; d <= 5; ++d) {
      for (int i = 0; i < 50; ++i) {
        const auto p = random_potential(d, rng);
        ++runs;
        const auto rep = enumerate_short_geodesics(p);
        for (const auto& e : rep.errors)
          if (e.find("second geodesic") != std::string::npos) ++doubled;
        if (rep.non_generic()) {
          ++non_generic;
          continue;
        }
        if (rep.count() < d - 1 || rep.count() > d * (d - 1) / 2) ++out_of_bounds;
        if (i < 10) {
          traced_rotations.push_back({p, 0.0});
          for (const auto& g : rep.geodesics) traced_rotations.push_back({p, g.t_star});
        }
      }
    }
    const bool ok = out_of_bounds == 0 && doubled == 0 && non_generic * 10 <= runs;
    return Outcome{ok, std::to_string(runs) + " runs, " + std::to_string(non_generic) + " non-generic, " +
                           std::to_string(out_of_bounds) + " out of bounds, " + std::to_string(doubled) +
                           " pairs with two geodesics"};
  });

  run(4, "constructive realization", 10, [] {
    int cases = 0, wrong = 0;
    for (int d = 2; d <= 8; ++d)
      for (int k = d - 1; k <= d * (d - 1) / 2; ++k) {
        ++cases;
        if (visible_pairs(realize_count(d, k)).count() != k) ++wrong;
      }
    return Outcome{wrong == 0, std::to_string(cases) + " (d, k) cases, " + std::to_string(wrong) + " wrong"};
  });

  run(5, "correction integrals", 10, [] {
    const auto p = pot({1, 0, -1});
    const auto small = alpha_contour_integrals(p, circle_contour(0.0, 2.0, 256), 3);
    const auto large = alpha_contour_integrals(p, circle_contour(0.0, 3.0, 256), 3);
    const double a0 = std::abs(small[0] - cplx(0.0, -pi));
    double deform = 0.0;
    for (int j = 0; j <= 3; ++j) deform = std::max(deform, std::abs(small[j] - large[j]));
    return Outcome{a0 <= 1e-8 && deform <= 1e-8,
                   "|alpha_0 loop + pi i| = " + fmt("%.2e", a0) + ", radius 2 vs 3 difference " + fmt("%.2e", deform)};
  });

  run(6, "chord diagrams", 600, [] {
    std::mt19937_64 rng(777);
    int runs = 0, bad = 0;
    std::string first;
    for (int d = 3; d <= 5; ++d) {
      for (int i = 0; i < 30; ++i) {
        const auto p = random_potential(d, rng);
        ++runs;
        try {
          const auto cd = chord_diagram(p);
          for (const auto* c : {&cd.stokes, &cd.anti_stokes})
            if (static_cast<int>(c->chords.size()) != d - 1 || !valid_chord_diagram(*c)) throw std::runtime_error("invalid diagram");
        } catch (const std::exception& e) {
          if (first.empty()) first = e.what();
          ++bad;
        }
      }
    }
    return Outcome{bad == 0, std::to_string(runs) + " polynomials, " + std::to_string(bad) + " failed" +
                                 (first.empty() ? "" : " (" + first + ")")};
  });

  run(7, "Teichmuller identity", 1, [] {
    const double d1 = teichmuller_defect({{{1, 0}, {1, 0}}, {}});
    const double d2 = teichmuller_defect({{{2, pi / 2}}, {-2}});
    bool valid = std::abs(d1) < 1e-14 && std::abs(d2) < 1e-14;
    int negative = 0;
    for (int i = 1; i <= 10; ++i)
      for (int j = 1; j <= 10; ++j)
        negative += teichmuller_defect({{{1, 2 * pi * i / 10}, {1, 2 * pi * j / 10}}, {}}) < 0.0;
    return Outcome{valid && negative == 100,
                   std::string("tabulated polygons ") + (valid ? "zero" : "nonzero") + ", " + std::to_string(negative) +
                       "/100 bigons negative"};
  });

  run(8, "Re xi drift along traces", 600, [] {
    double worst = 0.0;
    int traces = 0;
    for (const auto& [p, t] : traced_rotations) worst = std::max(worst, graph_drift(p.rotated(t), traces));
    return Outcome{traces > 0 && worst <= 1e-6, std::to_string(traces) + " traces over " +
                                                     std::to_string(traced_rotations.size()) +
                                                     " rotations, max drift / (1 + L) = " + fmt("%.2e", worst)};
  });

  run(9, "sector invariance under positive scaling", 1, [] {
    std::vector<ComplexPolynomial> ps{ComplexPolynomial({1, 0, -1}), ComplexPolynomial({cplx(0.3, -2.0), 1, 0, 4}),
                                      ComplexPolynomial({cplx(-1, 1), 0, 0, 0, 1}, 0.7), ComplexPolynomial({1, 0})};
    int checked = 0, equal = 0;
    for (const auto& p : ps)
      for (double c : {2.0, 10.0, 0.5}) {
        ++checked;
        equal += stokes_sectors(p.scaled(c)) == stokes_sectors(p);
      }
    return Outcome{equal == checked, std::to_string(equal) + "/" + std::to_string(checked) + " exactly equal"};
  });

  return failures == 0 ? 0 : 1;
}
