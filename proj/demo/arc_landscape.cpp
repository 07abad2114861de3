// |T_n(x)| on a uniform grid next to its major-arc approximation φ_n, for the
// λ² and d₂ weights. Writes one CSV and one SVG per weight and prints the
// tallest peaks with the rational each one sits on.
//
//   arc_landscape [n = 100000] [out_dir = .]

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "circle_ergodic/circle_ergodic.hpp"

using namespace ce;

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? static_cast<std::size_t>(std::stod(argv[1])) : 100'000;
  const std::filesystem::path out = argc > 2 ? argv[2] : ".";
  std::filesystem::create_directories(out);
  constexpr std::size_t M = 4096;
  const ArcParams p = arc_params(n);
  std::printf("n = %zu  P = %.1f  Q = %.1f\n", n, p.P, p.Q);

  for (const char* kind : {"hecke2", "piltz2"}) {
    const Workspace ws = make_workspace(kind, n);
    const AmplitudeTable table = ws.amplitudes(phi_q_limit(default_s_max(p)));
    const Approximant ap = table.at(ws.w, n);
    const auto S = exp_sum_grid(ws.w, n, M);

    std::vector<std::vector<double>> rows;
    std::vector<std::pair<double, double>> curve;
    double worst = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double x = static_cast<double>(j) / M;
      const double t = std::abs(S[j]) / ws.w.prefix[n];
      const double f = std::abs(phi(x, p, ap));
      rows.push_back({x, t, f});
      curve.push_back({x, t});
      worst = std::max(worst, std::abs(S[j] / ws.w.prefix[n] - phi(x, p, ap)));
    }
    {
      std::ofstream os(out / (std::string("landscape_") + kind + ".csv"));
      write_csv(os, {"x", "abs_T", "abs_phi"}, rows);
    }
    PlotOptions opt;
    opt.title = std::string("|T_n(x)|, ") + kind + ", n = " + std::to_string(n);
    opt.x_label = "x";
    opt.y_label = "|T_n(x)|";
    opt.markers = false;
    emit_plot(curve, out / (std::string("landscape_") + kind + ".svg"), opt);

    // Peaks: local maxima above 0.05, tallest first.
    std::vector<std::pair<double, std::size_t>> peaks;
    for (std::size_t j = 0; j < M; ++j) {
      const double c = rows[j][1], l = rows[(j + M - 1) % M][1], r = rows[(j + 1) % M][1];
      if (c >= l && c > r && c > 0.05) peaks.push_back({c, j});
    }
    std::sort(peaks.rbegin(), peaks.rend());
    std::printf("\n%s: sup |T_n - phi_n| = %.4f\n  %-10s %-9s %s\n", kind, worst, "x", "|T_n|", "near");
    for (std::size_t i = 0; i < std::min<std::size_t>(peaks.size(), 8); ++i) {
      const double x = static_cast<double>(peaks[i].second) / M;
      const Rational r = best_rational(x, 20);
      std::printf("  %-10.6f %-9.4f %llu/%llu\n", x, peaks[i].first, static_cast<unsigned long long>(r.a),
                  static_cast<unsigned long long>(r.q));
    }
  }
}
