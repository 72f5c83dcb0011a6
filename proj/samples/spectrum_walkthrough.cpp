// Graph, short geodesics, accumulation rays and eigenvalues for a potential.
// usage: spectrum_walkthrough [coefficients]   e.g. "1,0,-1" (the default)

#include <cstdio>
#include <string>

#include "stokes/spectrum.hpp"
#include "stokes/strips.hpp"

using namespace stokes;

int main(int argc, char** argv) {
  const std::string text = argc > 1 ? argv[1] : "1,0,-1";
  Potential p;
  try {
    p = Potential::from(parse_polynomial(text));
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  std::printf("P = %s, degree %d\n", text.c_str(), p.degree());
  for (const auto& tp : p.turning_points.points)
    std::printf("  turning point % .6f %+.6fi  (m = %d)\n", tp.location.real(), tp.location.imag(), tp.multiplicity);

  const auto g = build_stokes_graph(p);
  std::printf("Stokes graph: %d finite, %d escaping, %zu complexes%s\n", g.finite_edge_count(),
              g.escaping_edge_count(), g.complexes.size(), g.complete ? "" : " (incomplete)");

  if (!p.turning_points.all_simple() || p.turning_points.size() < 2) return 0;
  const auto rep = enumerate_short_geodesics(p);
  std::printf("%d short geodesics\n", rep.count());
  for (const auto& s : rep.geodesics)
    std::printf("  %d-%d at t* = %.10f, |w| = %.8f\n", s.a, s.b, s.t_star, std::abs(s.period));
  for (const auto& e : rep.errors) std::printf("  ! %s\n", e.c_str());

  for (const auto& ray : accumulation_rays(p, rep)) {
    std::printf("ray at angle %.8f, loop period %.8f %+.8fi\n", ray.angle, ray.loop_period.real(),
                ray.loop_period.imag());
    const auto lead = eigenvalue_asymptotics(p, ray, 0, 5, 0);
    const auto corr = eigenvalue_asymptotics(p, ray, 0, 5, 3);
    for (std::size_t k = 0; k < lead.size(); ++k)
      std::printf("  n=%d  order 0: % .8f %+.8fi   order 3: % .8f %+.8fi\n", lead[k].n, lead[k].value.real(),
                  lead[k].value.imag(), corr[k].value.real(), corr[k].value.imag());
  }

  // harmonic oscillator only: compare with zeros of the Wronskian
  if (text == "1,0,-1") {
    const auto res = wronskian_eigenvalue_search(p, 0, 2, {0.5, 7.5, -1, 1}, 7);
    std::printf("Wronskian zeros:");
    for (cplx z : res.zeros) std::printf(" %.10f", z.real());
    std::printf("  (%zu evaluations)\n", res.evaluations);
  }

  try {
    const auto vf = is_very_flat(p);
    if (vf.very_flat)
      std::printf("very flat: strip with %d nodes, %d visible pairs\n", vf.strip->size(),
                  visible_pairs(*vf.strip).count());
    else
      std::printf("not very flat: %s\n", vf.reason.c_str());
  } catch (const Error& e) {
    std::printf("very flat test undecided: %s\n", e.what());
  }
  return 0;
}
