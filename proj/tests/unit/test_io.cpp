#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "dppbound/io.hpp"
#include "dppbound/svg.hpp"

using namespace dppbound;

TEST_CASE("doubles round-trip") {
  for (const double v : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("point patterns round-trip") {
  PointPatterns p;
  p.dim = 2;
  p.ids = {"a", "b"};
  p.patterns = {PointSet{{0.1, 0.2}, {1.0 / 3.0, -4.0}}, PointSet{{7.0, 8.0}}};
  const PointPatterns q = parse_point_patterns(format_point_patterns(p));
  CHECK(q.dim == 2);
  CHECK(q.ids == p.ids);
  REQUIRE(q.patterns.size() == 2);
  CHECK(q.patterns[0].coords() == p.patterns[0].coords());
  CHECK(q.patterns[1].coords() == p.patterns[1].coords());
}

TEST_CASE("malformed pattern files are rejected") {
  CHECK_THROWS_AS(parse_point_patterns(""), InputError);
  CHECK_THROWS_AS(parse_point_patterns("id,x1\na,1\n"), InputError);
  CHECK_THROWS_AS(parse_point_patterns("sample_id,x2\na,1\n"), InputError);
  CHECK_THROWS_AS(parse_point_patterns("sample_id,x1\na,abc\n"), InputError);
  CHECK_THROWS_AS(parse_point_patterns("sample_id,x1\na,1,2\n"), InputError);
  CHECK_THROWS_AS(parse_point_patterns("sample_id,x1\na,nan\n"), InputError);
  CHECK_THROWS_AS(parse_point_patterns("sample_id,x1\na,1\nb,2\na,3\n"), InputError);
}

TEST_CASE("finite datasets map onto ground items") {
  const PointSet ground{{0.0}, {0.5}, {1.0}};
  PointPatterns p;
  p.dim = 1;
  p.ids = {"s1", "s2"};
  p.patterns = {PointSet{{1.0}, {0.0}}, PointSet{{0.5}}};
  const FiniteDataset d = finite_dataset_from_patterns(ground, p);
  CHECK(d.patterns[0].indices() == std::vector<Index>{0, 2});
  CHECK(d.patterns[1].indices() == std::vector<Index>{1});
  const PointPatterns back = patterns_from_finite(d);
  CHECK(back.patterns[0].size() == 2);

  p.patterns[1] = PointSet{{0.25}};
  CHECK_THROWS_AS(finite_dataset_from_patterns(ground, p), InputError);

  const PointSet g2 = parse_point_patterns("sample_id,x1\nq,1\n").patterns[0];
  CHECK(g2.size() == 1);
}

TEST_CASE("files are written atomically and read back") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dppbound_io_test" / "nested";
  fs::remove_all(dir.parent_path());
  const std::string path = (dir / "g.csv").string();
  write_file_atomic(path, format_ground_set(PointSet{{1.0, 2.0}, {3.0, 4.5}}));
  CHECK_FALSE(fs::exists(path + ".tmp"));
  const PointSet g = read_ground_set(path);
  CHECK(g.size() == 2);
  CHECK(g(1, 1) == 4.5);
  fs::remove_all(dir.parent_path());
  CHECK_THROWS_AS(read_file(path), InputError);
}

TEST_CASE("bounds and chain tables") {
  std::vector<SweepRow> rows{{10, -5.0, -4.0, 0.5}, {20, -4.6, -4.4, 1.5}};
  const NumericTable t = parse_numeric_csv(format_bounds_csv(rows, {std::nullopt, -4.5}));
  CHECK(t.header == std::vector<std::string>{"m", "lower", "upper", "gap", "exact", "seconds"});
  CHECK(std::isnan(t.rows[0][t.column("exact")]));
  CHECK(t.rows[1][t.column("exact")] == -4.5);
  CHECK(t.rows[1][t.column("gap")] == doctest::Approx(0.2));
  CHECK_THROWS_AS(t.column("nope"), InputError);

  ChainTrace tr;
  tr.names = {"kappa", "alpha"};
  ChainRecord r;
  r.iter = 1;
  r.theta = Vector(2);
  r.theta << 1000.0, 0.5;
  r.accepted = true;
  r.u = 0.25;
  r.logalpha_lo = -0.1;
  r.logalpha_hi = 0.2;
  r.m_cur = 20;
  r.m_prop = 30;
  r.refinements = 1;
  tr.records.push_back(r);
  const NumericTable c = parse_numeric_csv(format_chain_csv(tr));
  CHECK(c.header == std::vector<std::string>{"iter", "theta_1", "theta_2", "accepted", "u", "logalpha_lo", "logalpha_hi",
                                             "m_cur", "m_prop", "refinements", "fallback_flag"});
  CHECK(c.rows[0][c.column("theta_1")] == 1000.0);
  CHECK(c.rows[0][c.column("m_prop")] == 30.0);
}

TEST_CASE("summaries round-trip") {
  const Summary s{{"acceptance", "0.25"}, {"max_m", "30"}};
  CHECK(parse_summary(format_summary(s)) == s);
  CHECK_THROWS_AS(parse_summary("no equals sign\n"), InputError);
}

TEST_CASE("svg output") {
  SvgPlot p("t <1>", "x", "y");
  p.line({0.0, 1.0}, {0.0, 2.0}, "black", "curve");
  p.bars({0.0, 0.5, 1.0}, {1.0, 2.0}, "gray");
  const std::string s = p.render();
  CHECK(s.find("<svg") == 0);
  CHECK(s.find("t &lt;1&gt;") != std::string::npos);
  CHECK(s.find("polyline") != std::string::npos);
  CHECK_THROWS(p.line({0.0}, {0.0, 1.0}, "red"));
  const auto h = histogram_density({0.1, 0.2, 0.7}, {0.0, 0.5, 1.0});
  CHECK(h[0] * 0.5 + h[1] * 0.5 == doctest::Approx(1.0));
}
