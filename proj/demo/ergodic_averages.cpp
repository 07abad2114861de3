// Weighted ergodic averages along lacunary times for an irrational rotation
// and for the doubling map, with Cesàro, λ² and d₂ weights side by side.
//
//   ergodic_averages [n_max = 1000000] [seed = 1]

#include <cstdio>

#include "circle_ergodic/circle_ergodic.hpp"

using namespace ce;

int main(int argc, char** argv) {
  const std::size_t n_max = argc > 1 ? static_cast<std::size_t>(std::stod(argv[1])) : 1'000'000;
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;
  const int j_max = static_cast<int>(std::log2(static_cast<double>(n_max)));

  const Workspace ws[] = {make_workspace("cesaro", n_max), make_workspace("hecke2", n_max),
                          make_workspace("piltz2", n_max)};
  struct Case {
    const char* name;
    DynamicalSystem sys;
    Observable f;
    double limit;
  };
  const Case cases[] = {
      {"rotation by sqrt2-1, f = e(x)", DynamicalSystem::rotation(std::sqrt(2.0) - 1.0), Observable::character(1), 0.0},
      {"rotation by sqrt2-1, f = 1[0,1/3)", DynamicalSystem::rotation(std::sqrt(2.0) - 1.0),
       Observable::interval(0.0, 1.0 / 3.0), 1.0 / 3.0},
      {"doubling, f = 1[0,1/3)", DynamicalSystem::doubling(), Observable::interval(0.0, 1.0 / 3.0), 1.0 / 3.0},
  };

  Rng rng(seed);
  for (const Case& c : cases) {
    const double x0 = rng.uniform();
    std::printf("\n%s, x0 = %.6f, limit %.4f\n%10s", c.name, x0, c.limit, "N");
    std::vector<DiagnosticSeries> d;
    for (const Workspace& w : ws) {
      d.push_back(convergence_diagnostic(c.sys, w.w, c.f, x0, 2.0, j_max, seed));
      std::printf("  %14s", w.kind.c_str());
    }
    std::printf("\n");
    for (std::size_t i = 0; i < d[0].N.size(); i += 2) {
      std::printf("%10zu", d[0].N[i]);
      for (const auto& s : d) std::printf("  %14.6f", std::abs(s.average[i] - c.limit));
      std::printf("\n");
    }
  }
  std::printf("\ncolumns: |average - limit|\n");
}
