#include <gtest/gtest.h>

#include <chrono>

#include "circle_ergodic/io.hpp"

using namespace ce;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("ce_io_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

}  // namespace

TEST(Csv, RoundTripPrecision) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.0, 1e300, 0.38415782616788502}) {
    EXPECT_EQ(std::stod(fmt17(x)), x);
  }
  EXPECT_EQ(fmt17(6.0), "6");
  std::ostringstream os;
  write_csv(os, {"n", "w"}, {{1, 1}, {4, 6}});
  EXPECT_EQ(os.str(), "n,w\n1,1\n4,6\n");
}

TEST(Cache, TauBuildAndReload) {
  TempDir dir;
  const auto first = cached_tau_table(10000, dir.path());
  EXPECT_FALSE(first.hit);
  const auto again = cached_tau_table(10000, dir.path());
  EXPECT_TRUE(again.hit);
  ASSERT_EQ(again.table.tau.size(), first.table.tau.size());
  EXPECT_TRUE(again.table.tau == first.table.tau);
  EXPECT_TRUE(again.table.tau == tau_table(10000).tau);
}

TEST(Cache, TruncatedFileIsCorruption) {
  TempDir dir;
  const auto c = cached_tau_table(1000, dir.path());
  const auto size = fs::file_size(c.path);
  fs::resize_file(c.path, size - 7);
  EXPECT_THROW(cached_tau_table(1000, dir.path()), CorruptionError);
}

TEST(Cache, FlippedByteIsCorruption) {
  TempDir dir;
  const auto c = cached_tau_table(1000, dir.path());
  std::string bytes = slurp(c.path);
  bytes[bytes.size() - 100] ^= 0x10;
  std::ofstream(c.path, std::ios::binary | std::ios::trunc) << bytes;
  EXPECT_THROW(cached_tau_table(1000, dir.path()), CorruptionError);
}

TEST(Cache, HeaderMismatches) {
  TempDir dir;
  const auto p = dir.path() / "col.cecache";
  save_column(p, "weights", 5, std::vector<double>{1, 2, 3});
  EXPECT_EQ(load_column<double>(p, "weights", 5), (std::vector<double>{1, 2, 3}));
  EXPECT_THROW(load_column<double>(p, "tau", 5), CorruptionError);
  EXPECT_THROW(load_column<double>(p, "weights", 6), CorruptionError);
  EXPECT_THROW(load_column<float>(p, "weights", 5), CorruptionError);
  std::ofstream(dir.path() / "junk.cecache") << "not a cache";
  EXPECT_THROW(load_column<double>(dir.path() / "junk.cecache", "weights", 5), CorruptionError);
  EXPECT_THROW(load_column<double>(dir.path() / "missing.cecache", "weights", 5), IoError);
}

TEST(Cache, EnvironmentOverride) {
  ::setenv("CE_CACHE_DIR", "/tmp/ce_override", 1);
  EXPECT_EQ(default_cache_dir(), fs::path("/tmp/ce_override"));
  ::unsetenv("CE_CACHE_DIR");
  EXPECT_EQ(default_cache_dir(), fs::path(".ce_cache"));
}

TEST(Svg, SinglePoint) {
  const auto svg = render_svg({{1.0, 2.0}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  std::size_t markers = 0;
  for (std::size_t i = svg.find("<circle"); i != std::string::npos; i = svg.find("<circle", i + 1)) ++markers;
  EXPECT_EQ(markers, 1u);
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(Svg, DeterministicBytes) {
  TempDir dir;
  std::vector<std::pair<double, double>> s;
  for (int i = 1; i <= 4096; ++i) s.push_back({i / 4096.0, std::abs(std::sin(i * 0.01)) + 1e-3});
  PlotOptions o;
  o.title = "|T_n(x)| & friends";
  o.log_y = true;
  o.markers = false;
  emit_plot(s, dir.path() / "a.svg", o);
  emit_plot(s, dir.path() / "b.svg", o);
  const auto a = slurp(dir.path() / "a.svg");
  EXPECT_EQ(a, slurp(dir.path() / "b.svg"));
  EXPECT_NE(a.find("&amp;"), std::string::npos);
}

TEST(Svg, Errors) {
  EXPECT_THROW(render_svg({}), DomainError);
  PlotOptions o;
  o.log_x = true;
  EXPECT_THROW(render_svg({{0.0, 1.0}}, o), DomainError);
  EXPECT_THROW(render_svg({{1.0, std::nan("")}}), DomainError);
  EXPECT_THROW(emit_plot({{1.0, 1.0}}, "/nonexistent_dir/x.svg"), IoError);
}
