#pragma once

// Persistence and output: CSV with round-trip precision, a checksummed binary
// column cache, and a small deterministic SVG plotter.

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <string>
#include <vector>

#include "circle_ergodic/weights.hpp"

namespace ce {

// ---------------------------------------------------------------------------
// CSV.

/// 17 significant digits: enough to reproduce any double exactly.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  write_csv_row(os, header);
  std::vector<std::string> cells;
  for (const auto& r : rows) {
    cells.clear();
    for (double x : r) cells.push_back(fmt17(x));
    write_csv_row(os, cells);
  }
}

// ---------------------------------------------------------------------------
// Binary column cache.
//
// Layout (host byte order, which is recorded):
//   magic "CECACHE\0" | u32 version | u32 byte-order tag | u32 element size |
//   u32 kind length | kind bytes | u64 N | u64 count | u32 crc32(payload) |
//   payload (count elements)

inline constexpr char kCacheMagic[8] = {'C', 'E', 'C', 'A', 'C', 'H', 'E', '\0'};
inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr std::uint32_t kByteOrderTag = 0x01020304u;

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("CE_CACHE_DIR"); env && *env) return env;
  return ".ce_cache";
}

namespace detail {

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw CorruptionError("cache truncated while reading " + what);
  return v;
}

inline std::uint32_t crc_of(const void* data, std::size_t bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  while (bytes > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    bytes -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace detail

template <class T>
void save_column(const std::filesystem::path& path, const std::string& kind, std::uint64_t N,
                 const std::vector<T>& values) {
  static_assert(std::is_trivially_copyable_v<T>);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create cache directory " + path.parent_path().string() + ": " + ec.message());
  }
  // Write to a temporary name first so a crash never leaves a valid-looking
  // partial file under the final name.
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    os.write(kCacheMagic, sizeof kCacheMagic);
    detail::put(os, kCacheVersion);
    detail::put(os, kByteOrderTag);
    detail::put(os, static_cast<std::uint32_t>(sizeof(T)));
    detail::put(os, static_cast<std::uint32_t>(kind.size()));
    os.write(kind.data(), static_cast<std::streamsize>(kind.size()));
    detail::put(os, N);
    detail::put(os, static_cast<std::uint64_t>(values.size()));
    detail::put(os, detail::crc_of(values.data(), values.size() * sizeof(T)));
    os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(T)));
    if (!os) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " into place: " + ec.message());
}

template <class T>
std::vector<T> load_column(const std::filesystem::path& path, const std::string& kind, std::uint64_t N) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[sizeof kCacheMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCacheMagic, sizeof magic) != 0)
    throw CorruptionError(path.string() + ": not a cache file");
  if (detail::get<std::uint32_t>(is, "version") != kCacheVersion)
    throw CorruptionError(path.string() + ": unsupported cache version");
  if (detail::get<std::uint32_t>(is, "byte order") != kByteOrderTag)
    throw CorruptionError(path.string() + ": written with another byte order");
  if (detail::get<std::uint32_t>(is, "element size") != sizeof(T))
    throw CorruptionError(path.string() + ": element size mismatch");
  const auto klen = detail::get<std::uint32_t>(is, "kind length");
  if (klen > 256) throw CorruptionError(path.string() + ": bad kind length");
  std::string k(klen, '\0');
  if (!is.read(k.data(), klen)) throw CorruptionError(path.string() + ": truncated kind");
  if (k != kind) throw CorruptionError(path.string() + ": holds '" + k + "', expected '" + kind + "'");
  if (detail::get<std::uint64_t>(is, "N") != N) throw CorruptionError(path.string() + ": N mismatch");
  const auto count = detail::get<std::uint64_t>(is, "count");
  const auto crc = detail::get<std::uint32_t>(is, "checksum");
  const auto header_end = static_cast<std::uint64_t>(is.tellg());
  const auto size = std::filesystem::file_size(path);
  if (size != header_end + count * sizeof(T))
    throw CorruptionError(path.string() + ": payload size " + std::to_string(size - header_end) + " bytes, expected " +
                          std::to_string(count * sizeof(T)));
  std::vector<T> values(count);
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(T))))
    throw CorruptionError(path.string() + ": truncated payload");
  if (detail::crc_of(values.data(), values.size() * sizeof(T)) != crc)
    throw CorruptionError(path.string() + ": checksum mismatch");
  return values;
}

struct CachedTau {
  TauTable table;
  bool hit = false;
  std::filesystem::path path;
};

/// τ(1..N) from `dir`, building and storing it on a miss. A file that fails
/// validation raises CorruptionError instead of being rebuilt silently.
inline CachedTau cached_tau_table(std::size_t N, const std::filesystem::path& dir) {
  CachedTau out;
  out.path = dir / ("tau_" + std::to_string(N) + ".cecache");
  if (std::filesystem::exists(out.path)) {
    out.table.N = N;
    out.table.tau = load_column<i128>(out.path, "tau", N);
    if (out.table.tau.size() != N + 1) throw CorruptionError(out.path.string() + ": wrong element count");
    out.hit = true;
    return out;
  }
  out.table = tau_table(N);
  save_column(out.path, "tau", N, out.table.tau);
  return out;
}

// ---------------------------------------------------------------------------
// SVG.

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  bool log_y = false;
  bool markers = true;
  bool lines = true;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string fixed3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace detail

/// Self-contained SVG of one series; identical input gives identical bytes.
inline std::string render_svg(const std::vector<std::pair<double, double>>& series, const PlotOptions& opt = {}) {
  if (series.empty()) throw DomainError("cannot plot an empty series");
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
  for (auto [x, y] : series) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("plot values must be finite");
    if ((opt.log_x && x <= 0) || (opt.log_y && y <= 0)) throw DomainError("log axis needs positive values");
  }
  double x0 = tx(series[0].first), x1 = x0, y0 = ty(series[0].second), y1 = y0;
  for (auto [x, y] : series) {
    x0 = std::min(x0, tx(x));
    x1 = std::max(x1, tx(x));
    y0 = std::min(y0, ty(y));
    y1 = std::max(y1, ty(y));
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double L = 70, R = 20, T = 40, B = 50;
  const double W = opt.width, H = opt.height;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
    << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    s << "<text x=\"" << detail::fixed3(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << detail::xml_escape(opt.title) << "</text>\n";
  // Axes and five ticks per axis.
  s << "<g stroke=\"black\" stroke-width=\"1\">\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double gx = L + (W - L - R) * i / 4.0, gy = H - B - (H - T - B) * i / 4.0;
    const double vx = opt.log_x ? std::pow(10.0, fx) : fx, vy = opt.log_y ? std::pow(10.0, fy) : fy;
    s << "<line x1=\"" << detail::fixed3(gx) << "\" y1=\"" << H - B << "\" x2=\"" << detail::fixed3(gx) << "\" y2=\""
      << H - B + 5 << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << detail::fixed3(gx) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << detail::tick_label(vx) << "</text>\n";
    s << "<line x1=\"" << L - 5 << "\" y1=\"" << detail::fixed3(gy) << "\" x2=\"" << L << "\" y2=\""
      << detail::fixed3(gy) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << L - 8 << "\" y=\"" << detail::fixed3(gy + 4) << "\" text-anchor=\"end\">"
      << detail::tick_label(vy) << "</text>\n";
  }
  s << "<text x=\"" << detail::fixed3((L + W - R) / 2) << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(opt.x_label + (opt.log_x ? " (log)" : "")) << "</text>\n";
  s << "<text x=\"16\" y=\"" << detail::fixed3((T + H - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << detail::fixed3((T + H - B) / 2) << ")\">" << detail::xml_escape(opt.y_label + (opt.log_y ? " (log)" : ""))
    << "</text>\n</g>\n";
  if (opt.lines && series.size() > 1) {
    s << "<polyline fill=\"none\" stroke=\"#1f4e9a\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < series.size(); ++i)
      s << (i ? " " : "") << detail::fixed3(px(series[i].first)) << ',' << detail::fixed3(py(series[i].second));
    s << "\"/>\n";
  }
  if (opt.markers || series.size() == 1) {
    s << "<g fill=\"#c0392b\">\n";
    for (auto [x, y] : series)
      s << "<circle cx=\"" << detail::fixed3(px(x)) << "\" cy=\"" << detail::fixed3(py(y)) << "\" r=\"2\"/>\n";
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline void emit_plot(const std::vector<std::pair<double, double>>& series, const std::filesystem::path& path,
                      const PlotOptions& opt = {}) {
  const std::string svg = render_svg(series, opt);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << svg;
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace ce
