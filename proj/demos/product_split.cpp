// Builds the Lorentzian product of a time grid with a small metric space,
// forgets the base, and recovers it from the parallel vertical lines.
//
//   demo_product [tripod|euclid-grid|pair] [step]

#include <cstdio>
#include <string>

#include "lps/parallels.hpp"
#include "lps/splitting.hpp"

using namespace lps;

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "tripod";
  const double step = argc > 2 ? std::stod(argv[2]) : 0.25;
  MetricSampleIn base;
  if (which == "tripod") {
    base = base_tripod(1.0, 1);
  } else if (which == "euclid-grid") {
    base = base_euclid_grid(4, 1.0);
  } else if (which == "pair") {
    base = base_pair(1.0);
  } else {
    std::fprintf(stderr, "unknown base %s\n", which.c_str());
    return 2;
  }
  const auto prod = build_product(base, TimeGrid::window(-8.0, 8.0, step));
  std::printf("product over %s: %zu points, %zu lines, step %g\n", which.c_str(), prod.space.size(),
              prod.lines.size(), step);

  // Two lines span a flat strip; its width is the base distance.
  const auto S = flat_strip_reconstruct(prod.space, prod.lines[0], prod.lines[1]);
  std::printf("strip %s | %s: width %.9f (base %.9f), max tau error %.2g\n", prod.lines[0].label.c_str(),
              prod.lines[1].label.c_str(), S.width, base.d(0, 1), S.max_tau_error);

  RoundTripOptions o;
  o.threads = 4;
  const auto rt = round_trip(prod.space, prod.lines, base, o);
  std::printf("\n%-10s %-10s %8s %8s %8s\n", "a", "b", "d", "dS", "fit c0");
  const auto& B = rt.metric;
  for (std::size_t i = 0; i < B.m; ++i)
    for (std::size_t j = i + 1; j < B.m; ++j)
      std::printf("%-10s %-10s %8.4f %8.4f %8.4f\n", B.labels[i].c_str(), B.labels[j].c_str(),
                  base.d(rt.base_index[i], rt.base_index[j]), B.d(i, j), B.fit[i * B.m + j]);
  std::printf("\nmax |dS - d| = %g (grid step %g)\n", rt.max_deviation, rt.step);
  std::printf("CAT(0): %zu triples, worst margin %g, %zu skipped without midpoint\n", rt.cat0.triples_checked,
              rt.cat0.worst_margin, rt.cat0.midpoint_missing);
  std::printf("embedding: max tau error %g, causal agreement %g\n", rt.embedding.max_tau_error,
              rt.embedding.causal_agreement());
  return 0;
}
