#include "doctest.h"

#include "exotest/dataset.hpp"
#include "exotest/error.hpp"
#include "support/fixtures.hpp"

using namespace exotest;

namespace {

std::size_t parse_error_line(std::string_view text) {
  try {
    parse_csv(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("parse a small file") {
  const Dataset d = parse_csv("y,delta,x,w,z\n1.5,1,0,1,0\n2,0,1,0,1\n");
  REQUIRE(d.size() == 2);
  CHECK(d[0] == Observation{1.5, 1, 0, 1, 0});
  CHECK(d[1] == Observation{2.0, 0, 1, 0, 1});
  CHECK(d.censoring_rate() == 0.5);
  CHECK(d.levels_x() == std::vector<Level>{0, 1});
}

TEST_CASE("parser tolerates BOM, CRLF, blank lines and trailing columns") {
  const Dataset d = parse_csv("\xEF\xBB\xBFy,delta,x,w,z,u_t\r\n\r\n3,1,2,0,1,0.25\r\n");
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Observation{3.0, 1, 2, 0, 1});
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error_line("y,delta,x,w,z\n1,1,0,0,0\n-1,1,0,0,0\n") == 3);
  CHECK(parse_error_line("y,delta,x,w,z\n1,2,0,0,0\n") == 2);
  CHECK(parse_error_line("y,delta,x,w,z\n1,1,0,0\n") == 2);
  CHECK(parse_error_line("y,delta,x,w,z\n1,1,a,0,0\n") == 2);
  CHECK(parse_error_line("y,delta,x,w,z\nnan,1,0,0,0\n") == 2);
  CHECK(parse_error_line("y,delta,x,w,z\n1,1,0,-1,0\n") == 2);
  CHECK(parse_error_line("t,d,x,w,z\n1,1,0,0,0\n") == 1);
  CHECK(parse_error_line("") == 0);
  CHECK(parse_error_line("y,delta,x,w,z\n") == 0);
}

TEST_CASE("csv round trip is exact") {
  std::mt19937_64 rng(5);
  const Dataset d = fixture::random_dataset(rng, 200, true, 3);
  CHECK(parse_csv(to_csv(d)) == d);
}

TEST_CASE("constructor validates rows") {
  CHECK_THROWS_AS(Dataset({}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{0.0, 1, 0, 0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Dataset({{1.0, 3, 0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("cell audit on a four-row single cell") {
  const Dataset d = parse_csv("y,delta,x,w,z\n1,1,0,0,0\n2,0,0,0,0\n3,1,0,0,0\n4,1,0,0,0\n");
  const CellTable t = cell_audit(d);
  REQUIRE(t.size() == 1);
  CHECK(t[0].count == 4);
  CHECK(t[0].censoring_rate == 0.25);
  CHECK(to_csv(t) == "x,w,z,count,censoring_rate\n0,0,0,4,0.25\n");
}

TEST_CASE("cell audit reproduces the fixture generator's counts") {
  const Dataset d = fixture::jtpa_like(1);
  CHECK(d.size() == 1127);
  const CellTable t = cell_audit(d);
  REQUIRE(t.size() == 8);
  for (const auto& spec : fixture::kJtpaCells) {
    const auto it = std::find_if(t.begin(), t.end(), [&](const CellSummary& s) {
      return s.cell == Cell{spec.x, spec.w, spec.z};
    });
    REQUIRE(it != t.end());
    CHECK(it->count == spec.count);
    CHECK(it->censoring_rate ==
          doctest::Approx(static_cast<double>(fixture::censored_count(spec)) /
                          static_cast<double>(spec.count)));
  }
}

TEST_CASE("min cell check flags small cells under both schemes") {
  const Dataset d = parse_csv(
      "y,delta,x,w,z\n1,1,0,0,0\n2,1,0,0,0\n3,1,0,1,0\n4,1,0,1,0\n5,1,1,0,1\n");
  const auto small = min_cell_check(d, 2);
  REQUIRE(small.size() == 2);
  CHECK(small[0].cell == Cell{1, kAnyLevel, 1});
  CHECK(small[1].cell == Cell{1, 0, 1});
  CHECK(min_cell_check(d, 1).empty());
  CHECK(to_csv(CellTable{small[0]}) == "x,w,z,count,censoring_rate\n1,*,1,1,0\n");
}

TEST_CASE("format_double round trips") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 2.0})
    CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(2.0) == "2");
}
