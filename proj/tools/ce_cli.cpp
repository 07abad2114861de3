// ce: command-line front end.
//
// Exit codes: 0 success, 1 a verification suite failed, 2 usage or domain
// error, 3 I/O or cache corruption.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "circle_ergodic/circle_ergodic.hpp"

using namespace ce;
using json = nlohmann::ordered_json;

namespace {

struct Globals {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string cache_dir;
  std::uint64_t seed = 0;
  std::string format = "csv";
};

/// Parses "1e4,1e5,3e5" into exact integers.
std::vector<std::size_t> parse_grid(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("n-grid entry '" + item + "' is not a number");
    }
    if (used != item.size() || !(v >= 1) || v > 1e15 || v != std::floor(v))
      throw DomainError("n-grid entry '" + item + "' is not a positive integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw DomainError("empty n-grid");
  return out;
}

std::size_t parse_count(const std::string& s, const char* what) {
  return parse_grid(s).size() == 1 ? parse_grid(s)[0] : throw DomainError(std::string(what) + " takes one value");
}

std::filesystem::path cache_dir(const Globals& g) {
  return g.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(g.cache_dir);
}

TauTable tau_from_cache(std::size_t N, const Globals& g) {
  const auto c = cached_tau_table(N, cache_dir(g));
  std::cerr << (c.hit ? "cache hit: " : "cache miss, built and stored: ") << c.path.string() << "\n";
  return c.table;
}

/// Weight kinds accepted on the command line: hecke2, cesaro, piltz (with
/// --v) or piltz<v>.
std::string resolve_kind(std::string kind, int v) {
  if (kind == "piltz") {
    if (v < 2 || v > 8) throw DomainError("--kind piltz needs --v in [2, 8]");
    kind += std::to_string(v);
  }
  check_kind(kind);
  return kind;
}

Workspace workspace(const std::string& kind, std::size_t n, const Globals& g) {
  return make_workspace(kind, n, [&](std::size_t N) { return tau_from_cache(N, g); });
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open " + path + " for writing");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("write failed");
    }
  }

 private:
  std::ofstream file_;
};

void write_json(const json& j, const std::string& out) {
  Output o(out);
  o.os() << j.dump(2) << "\n";
  o.close();
}

void write_table(const Globals& g, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                 const std::string& out) {
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json o;
      for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = json_number(r[i]);
      arr.push_back(o);
    }
    write_json(arr, out);
    return;
  }
  Output o(out);
  write_csv(o.os(), header, rows);
  o.close();
}

Observable parse_observable(const std::string& s) {
  if (s.rfind("char:", 0) == 0) return Observable::character(std::stoll(s.substr(5)));
  if (s.rfind("interval:", 0) == 0) {
    const auto rest = s.substr(9);
    const auto c = rest.find(':');
    if (c == std::string::npos) throw DomainError("interval observable is interval:<lo>:<hi>");
    return Observable::interval(std::stod(rest.substr(0, c)), std::stod(rest.substr(c + 1)));
  }
  if (s.rfind("table:", 0) == 0) {
    std::vector<double> vals;
    std::stringstream ss(s.substr(6));
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    return Observable::grid_table(std::move(vals));
  }
  throw DomainError("observable must be char:<m>, interval:<lo>:<hi> or table:<v1,v2,...>");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circle-method exponential sums, singular coefficients and weighted ergodic averages"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (default: logical cores)")->check(CLI::Range(1u, 1024u));
  app.add_option("--cache-dir", g.cache_dir, "table cache directory (default: $CE_CACHE_DIR or ./.ce_cache)");
  app.add_option("--seed", g.seed, "seed for the xoshiro256** generator");
  app.add_option("--format", g.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}));

  // weights
  auto* wcmd = app.add_subcommand("weights", "tabulate a weight sequence and its prefix sums");
  std::string w_kind = "hecke2", w_out;
  int w_v = 0;
  std::string w_n = "100";
  wcmd->add_option("--kind", w_kind, "hecke2 | cesaro | piltz | piltz<v>");
  wcmd->add_option("--v", w_v, "Piltz order");
  wcmd->add_option("--n", w_n, "table length");
  wcmd->add_option("--out", w_out, "output file (default stdout)");

  // expsum
  auto* ecmd = app.add_subcommand("expsum", "weighted exponential sums S_n(x) and T_n(x)");
  std::string e_kind = "hecke2", e_out, e_n = "10000";
  int e_v = 0;
  std::vector<double> e_x;
  std::size_t e_grid = 0;
  ecmd->add_option("--kind", e_kind, "hecke2 | cesaro | piltz | piltz<v>");
  ecmd->add_option("--v", e_v, "Piltz order");
  ecmd->add_option("--n", e_n, "length of the sum");
  ecmd->add_option("--x", e_x, "evaluation points")->delimiter(',');
  ecmd->add_option("--grid", e_grid, "evaluate on j/M, j < M (M a power of two)");
  ecmd->add_option("--out", e_out, "output file");

  // coeffs
  auto* ccmd = app.add_subcommand("coeffs", "singular coefficients D_q or main-term polynomials");
  std::string c_kind = "hecke2", c_out, c_n = "1000000";
  int c_v = 0;
  std::uint64_t c_qmax = 20;
  ccmd->add_option("--kind", c_kind, "hecke2 | cesaro | piltz | piltz<v>");
  ccmd->add_option("--v", c_v, "Piltz order");
  ccmd->add_option("--q-max", c_qmax, "largest modulus")->check(CLI::Range(1, 100000));
  ccmd->add_option("--n", c_n, "n used to estimate C_Phi (hecke2)");
  ccmd->add_option("--out", c_out, "output file");

  // arcs
  auto* acmd = app.add_subcommand("arcs", "major/minor arc parameters and classification");
  std::string a_n = "1000000", a_out;
  double a_eps = 0.1, a_M = 1.0;
  std::vector<double> a_x;
  acmd->add_option("--n", a_n, "scale n");
  acmd->add_option("--eps", a_eps, "epsilon in (0, 1/2)");
  acmd->add_option("--M", a_M, "bump scale M >= 1");
  acmd->add_option("--x", a_x, "points to classify")->delimiter(',');
  acmd->add_option("--out", a_out, "output file");

  // verify
  auto* vcmd = app.add_subcommand("verify", "run verification suites and emit a JSON report");
  std::string v_suite = "all", v_kind = "hecke2", v_grid = "1e4,1e5", v_out;
  int v_v = 0;
  SuiteOptions v_opt;
  vcmd->add_option("--suite", v_suite, "rational | major | minor | phi | asymptotics | all, or a comma list");
  vcmd->add_option("--kind", v_kind, "hecke2 | cesaro | piltz | piltz<v>");
  vcmd->add_option("--v", v_v, "Piltz order");
  vcmd->add_option("--n-grid", v_grid, "comma-separated increasing n values");
  vcmd->add_option("--q-max", v_opt.q_max, "largest modulus for the rational suite");
  vcmd->add_option("--sample-size", v_opt.sample_size, "samples for the arc suites (>= 100)");
  vcmd->add_option("--grid-M", v_opt.grid_M, "grid size for the phi suite");
  vcmd->add_option("--out", v_out, "output file");
  bool v_time = false;
  vcmd->add_flag("--wall-time", v_time, "include wall times (breaks byte-for-byte reproducibility)");

  // ergodic
  auto* gcmd = app.add_subcommand("ergodic", "weighted ergodic averages and oscillation sums");
  std::string g_system = "rotation:0.41421356237309503", g_weights = "hecke2", g_obs = "char:1", g_out,
              g_nmax = "100000", g_kernel;
  int g_v = 0;
  double g_x0 = 0.3, g_rho = 2.0;
  std::size_t g_J = 10, g_support = 1000;
  gcmd->add_option("--system", g_system, "rotation:<theta> | doubling | shift");
  gcmd->add_option("--weights", g_weights, "hecke2 | cesaro | piltz | piltz<v>");
  gcmd->add_option("--v", g_v, "Piltz order");
  gcmd->add_option("--observable", g_obs, "char:<m> | interval:<lo>:<hi> | table:<v1,...>");
  gcmd->add_option("--x0", g_x0, "initial point in [0, 1)");
  gcmd->add_option("--rho", g_rho, "lacunary ratio > 1");
  gcmd->add_option("--n-max", g_nmax, "largest averaging length");
  gcmd->add_option("--out", g_out, "output file");
  gcmd->add_option("--oscillation", g_kernel, "emit an oscillation report for kernel weighted | cesaro | omega:<q>");
  gcmd->add_option("--J", g_J, "number of lacunary blocks (N_j = 2^{j-1})");
  gcmd->add_option("--support", g_support, "length of the random test sequence g");

  // plot
  auto* pcmd = app.add_subcommand("plot", "render |T_n(x)| on a grid, or two CSV columns, as SVG");
  std::string p_kind = "hecke2", p_n = "100000", p_out = "plot.svg", p_csv, p_xcol, p_ycol;
  int p_v = 0;
  std::size_t p_grid = 4096;
  bool p_logx = false, p_logy = false;
  pcmd->add_option("--kind", p_kind, "weight kind for the |T_n| plot");
  pcmd->add_option("--v", p_v, "Piltz order");
  pcmd->add_option("--n", p_n, "n for the |T_n| plot");
  pcmd->add_option("--grid", p_grid, "grid size M (power of two)");
  pcmd->add_option("--csv", p_csv, "plot columns of this CSV instead");
  pcmd->add_option("--x-col", p_xcol, "CSV column for x");
  pcmd->add_option("--y-col", p_ycol, "CSV column for y");
  pcmd->add_flag("--log-x", p_logx);
  pcmd->add_flag("--log-y", p_logy);
  pcmd->add_option("--out", p_out, "SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_threads(g.threads);

    if (*wcmd) {
      const std::string kind = resolve_kind(w_kind, w_v);
      const std::size_t n = parse_count(w_n, "--n");
      const Workspace ws = workspace(kind, std::max<std::size_t>(n, 10), g);
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 1; k <= n; ++k) rows.push_back({static_cast<double>(k), ws.w.values[k], ws.w.prefix[k]});
      write_table(g, {"n", "w", "prefix_sum"}, rows, w_out);
      return 0;
    }

    if (*ecmd) {
      const std::string kind = resolve_kind(e_kind, e_v);
      const std::size_t n = parse_count(e_n, "--n");
      const Workspace ws = workspace(kind, std::max<std::size_t>(n, 10), g);
      std::vector<std::vector<double>> rows;
      if (e_grid > 0) {
        const auto S = exp_sum_grid(ws.w, n, e_grid);
        for (std::size_t j = 0; j < e_grid; ++j) {
          const cplx T = S[j] / ws.w.prefix[n];
          rows.push_back({static_cast<double>(j) / static_cast<double>(e_grid), S[j].real(), S[j].imag(), std::abs(T)});
        }
      } else {
        if (e_x.empty()) throw DomainError("expsum needs --x or --grid");
        for (double x : e_x) {
          const cplx S = exp_sum(ws.w, x, n);
          rows.push_back({x, S.real(), S.imag(), std::abs(S) / ws.w.prefix[n]});
        }
      }
      write_table(g, {"x", "S_re", "S_im", "abs_T"}, rows, e_out);
      return 0;
    }

    if (*ccmd) {
      const std::string kind = resolve_kind(c_kind, c_v);
      const std::size_t n = parse_count(c_n, "--n");
      const Workspace ws = kind == "hecke2" ? workspace(kind, n, g) : make_workspace(kind, 10);
      json out;
      out["kind"] = kind;
      if (ws.is_hecke()) out["C_Phi_estimate"] = ws.c_phi;
      json arr = json::array();
      std::vector<std::vector<double>> rows;
      std::size_t width = 0;
      for (std::uint64_t q = 1; q <= c_qmax; ++q) {
        const LogPolynomial F = ws.main_term(q);
        const LogPolynomial G = ws.is_hecke() ? F : ws.amplitudes(q).poly[q];
        arr.push_back({{"q", q}, {"main_term", F.coeffs}, {"density", G.coeffs}});
        std::vector<double> row{static_cast<double>(q)};
        row.insert(row.end(), G.coeffs.begin(), G.coeffs.end());
        width = std::max(width, row.size());
        rows.push_back(std::move(row));
      }
      out["coefficients"] = arr;
      if (g.format == "json") {
        write_json(out, c_out);
      } else {
        std::vector<std::string> header{"q"};
        for (std::size_t i = 1; i < width; ++i)
          header.push_back(ws.is_hecke() ? "D_q" : "c" + std::to_string(width - 1 - i));
        for (auto& r : rows) r.resize(width, 0.0);
        Output o(c_out);
        write_csv(o.os(), header, rows);
        o.close();
      }
      return 0;
    }

    if (*acmd) {
      const ArcParams p = arc_params(parse_count(a_n, "--n"), a_eps, a_M);
      if (a_x.empty()) {
        write_table(g, {"n", "eps", "M", "P", "Q", "n0", "n0_disjoint"},
                    {{static_cast<double>(p.n), p.eps, p.M, p.P, p.Q, p.n0, p.n0_disjoint}}, a_out);
      } else {
        std::vector<std::vector<double>> rows;
        for (double x : a_x) {
          const auto c = classify(x, p);
          rows.push_back({x, c ? 1.0 : 0.0, c ? static_cast<double>(c->a) : 0.0, c ? static_cast<double>(c->q) : 0.0});
        }
        write_table(g, {"x", "major", "a", "q"}, rows, a_out);
      }
      return 0;
    }

    if (*vcmd) {
      const std::string kind = resolve_kind(v_kind, v_v);
      const auto grid = parse_grid(v_grid);
      const auto suites = parse_suites(v_suite);
      v_opt.seed = g.seed;
      const std::size_t nmax = grid.back();
      const Workspace ws = workspace(kind, nmax, g);
      const Workspace cs = make_workspace("cesaro", nmax);
      const auto reports = verify_suites(suites, ws, cs, grid, v_opt);
      json out;
      out["config"] = {{"subcommand", "verify"},
                       {"suite", v_suite},
                       {"kind", kind},
                       {"n_grid", grid},
                       {"seed", g.seed},
                       {"q_max", v_opt.q_max},
                       {"sample_size", v_opt.sample_size},
                       {"grid_M", v_opt.grid_M},
                       {"eps", 0.1}};
      const auto body = suites_to_json(reports, v_time);
      out["reports"] = body["reports"];
      out["pass"] = body["pass"];
      write_json(out, v_out);
      for (const auto& r : reports)
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.test_id << " [" << r.kind << "]\n";
      return body["pass"].get<bool>() ? 0 : 1;
    }

    if (*gcmd) {
      const std::string kind = resolve_kind(g_weights, g_v);
      if (!g_kernel.empty()) {
        // Oscillation report on the shift model.
        const LacunarySequence lac = dyadic_lacunary(g_rho, g_J);
        const std::size_t need = lac.Nj.back();
        KernelFamily fam;
        std::optional<Workspace> ws;
        std::uint64_t q = 0;
        if (g_kernel == "cesaro") {
          fam = KernelFamily::cesaro();
        } else if (g_kernel == "weighted") {
          ws = workspace(kind, std::max<std::size_t>(need, 10), g);
          fam = KernelFamily::weighted(ws->w);
        } else if (g_kernel.rfind("omega:", 0) == 0) {
          q = parse_count(g_kernel.substr(6), "omega:<q>");
          ws = workspace(kind, std::max<std::size_t>(need, 10), g);
          LogPolynomial amp = ws->is_hecke() ? ws->main_term(q) : ws->amplitudes(q).poly[q];
          fam = KernelFamily::omega(ws->w, amp);
        } else {
          throw DomainError("--oscillation takes weighted, cesaro or omega:<q>");
        }
        const Sequence gseq = random_sequence(g_support, 1, g.seed);
        const auto res = oscillation_sum(gseq, fam, lac);
        const double norm2 = gseq.norm2() * gseq.norm2();
        json out;
        out["config"] = {{"subcommand", "ergodic"},
                         {"kernel", g_kernel},
                         {"weights", kind},
                         {"rho", g_rho},
                         {"J", g_J},
                         {"support", g_support},
                         {"seed", g.seed}};
        out["g_norm2_squared"] = norm2;
        out["value"] = res.value;
        out["value_per_J"] = res.per_J;
        if (q > 0) out["scaled_by_q"] = res.value * std::pow(static_cast<double>(q) + 1.0, 0.9) / norm2;
        out["terms"] = res.terms;
        write_json(out, g_out);
        return 0;
      }
      const std::size_t nmax = parse_count(g_nmax, "--n-max");
      const Workspace ws = workspace(kind, std::max<std::size_t>(nmax, 10), g);
      const int j_max = static_cast<int>(std::floor(std::log(static_cast<double>(nmax)) / std::log(g_rho) + 1e-9));
      std::vector<std::vector<double>> rows;
      if (g_system == "shift") {
        // Averages of an i.i.d. normal sequence z along the shift orbit of 0.
        const Sequence z = random_sequence(nmax + 1, 0, g.seed);
        double r = g_rho;
        std::size_t last = 0;
        for (int j = 1; j <= j_max; ++j, r *= g_rho) {
          const auto N = static_cast<std::size_t>(std::floor(r));
          if (N == last || N > nmax) continue;
          last = N;
          rows.push_back({static_cast<double>(N), weighted_average_shift(ws.w, z.v, 0, N), 0.0});
        }
      } else {
        DynamicalSystem sys;
        if (g_system == "doubling")
          sys = DynamicalSystem::doubling();
        else if (g_system.rfind("rotation:", 0) == 0)
          sys = DynamicalSystem::rotation(std::stod(g_system.substr(9)));
        else
          throw DomainError("--system must be rotation:<theta>, doubling or shift");
        const auto d = convergence_diagnostic(sys, ws.w, parse_observable(g_obs), g_x0, g_rho, j_max, g.seed);
        for (std::size_t i = 0; i < d.N.size(); ++i)
          rows.push_back({static_cast<double>(d.N[i]), d.average[i].real(), d.average[i].imag()});
      }
      write_table(g, {"N", "average_re", "average_im"}, rows, g_out);
      return 0;
    }

    if (*pcmd) {
      std::vector<std::pair<double, double>> series;
      PlotOptions opt;
      opt.log_x = p_logx;
      opt.log_y = p_logy;
      if (!p_csv.empty()) {
        std::ifstream is(p_csv);
        if (!is) throw IoError("cannot open " + p_csv);
        std::string line;
        std::getline(is, line);
        std::vector<std::string> cols;
        {
          std::stringstream ss(line);
          std::string c;
          while (std::getline(ss, c, ',')) cols.push_back(c);
        }
        auto col = [&](const std::string& name) {
          for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return i;
          throw DomainError("no column '" + name + "' in " + p_csv);
        };
        const std::size_t xi = col(p_xcol.empty() ? cols.front() : p_xcol);
        const std::size_t yi = col(p_ycol.empty() ? cols.back() : p_ycol);
        while (std::getline(is, line)) {
          std::vector<std::string> cells;
          std::stringstream ss(line);
          std::string c;
          while (std::getline(ss, c, ',')) cells.push_back(c);
          if (cells.size() != cols.size()) throw DomainError("ragged CSV row: " + line);
          series.push_back({std::stod(cells[xi]), std::stod(cells[yi])});
        }
        opt.x_label = cols[xi];
        opt.y_label = cols[yi];
      } else {
        const std::string kind = resolve_kind(p_kind, p_v);
        const std::size_t n = parse_count(p_n, "--n");
        const Workspace ws = workspace(kind, std::max<std::size_t>(n, 10), g);
        const auto S = exp_sum_grid(ws.w, n, p_grid);
        for (std::size_t j = 0; j < p_grid; ++j)
          series.push_back({static_cast<double>(j) / static_cast<double>(p_grid), std::abs(S[j]) / ws.w.prefix[n]});
        opt.title = "|T_n(x)|, " + kind + ", n = " + std::to_string(n);
        opt.y_label = "|T_n(x)|";
        opt.markers = false;
      }
      emit_plot(series, p_out, opt);
      return 0;
    }
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: malformed number (" << e.what() << ")\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const CorruptionError& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
