// Per-block terms of the dyadic oscillation sum for a random sequence, for
// the Cesàro, λ² and ω_{n,q} kernels. The terms decay once the block length
// passes the support of g.
//
//   oscillation_scan [J = 18] [support = 1024] [seed = 3]

#include <cstdio>

#include "circle_ergodic/circle_ergodic.hpp"

using namespace ce;

int main(int argc, char** argv) {
  const std::size_t J = argc > 1 ? std::stoul(argv[1]) : 18;
  const std::size_t support = argc > 2 ? std::stoul(argv[2]) : 1024;
  const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 3;

  const auto lac = dyadic_lacunary(2.0, J);
  const Workspace ws = make_workspace("hecke2", std::max<std::size_t>(lac.Nj.back(), 10));
  const Sequence g = random_sequence(support, 1, seed);
  const double n2 = g.norm2() * g.norm2();

  const std::vector<std::pair<std::string, KernelFamily>> kernels = {
      {"cesaro", KernelFamily::cesaro()},
      {"lambda^2", KernelFamily::weighted(ws.w)},
      {"omega q=2", KernelFamily::omega(ws.w, ws.main_term(2))},
      {"omega q=5", KernelFamily::omega(ws.w, ws.main_term(5))},
  };
  std::vector<OscillationResult> res;
  std::printf("%4s %9s", "j", "N_j");
  for (const auto& k : kernels) {
    res.push_back(oscillation_sum(g, k.second, lac));
    std::printf("  %12s", k.first.c_str());
  }
  std::printf("\n");
  for (std::size_t j = 0; j < J; ++j) {
    std::printf("%4zu %9zu", j + 1, lac.Nj[j]);
    for (const auto& r : res) std::printf("  %12.4e", r.terms[j] / n2);
    std::printf("\n");
  }
  std::printf("%14s", "sum/|g|^2");
  for (const auto& r : res) std::printf("  %12.4e", r.value / n2);
  std::printf("\n");
}
