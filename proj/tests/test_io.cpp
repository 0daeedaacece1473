#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "dtwgi/error.hpp"
#include "dtwgi/io.hpp"
#include "dtwgi/random.hpp"

using namespace dtwgi;

TEST_CASE("doubles round-trip bit-exactly") {
  Rng rng(81);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  for (double v : {0.0, -0.0, 1e-308, 5e-324, 1.7976931348623157e308, 0.1})
    CHECK(parse_double(format_double(v)) == v);
  CHECK_THROWS_AS(parse_double(""), DataError);
  CHECK_THROWS_AS(parse_double("1.5x"), DataError);
  CHECK_THROWS_AS(parse_double(" 2"), DataError);
}

TEST_CASE("series files round-trip exactly") {
  Rng rng(82);
  const TimeSeries x(gaussian_matrix(17, 4, rng, 3.0));
  std::stringstream ss;
  write_series(ss, x);
  CHECK(ss.str().rfind("# dims=4 length=17\n", 0) == 0);
  const TimeSeries back = read_series(ss);
  CHECK(back.values() == x.values());

  const auto path = std::filesystem::temp_directory_path() / "dtwgi_io_test.csv";
  save_series(path, x);
  CHECK(load_series(path).values() == x.values());
  std::filesystem::remove(path);
}

TEST_CASE("malformed series files are data errors") {
  auto parse = [](const std::string &text) {
    std::istringstream is(text);
    return read_series(is);
  };
  CHECK(parse("# dims=2 length=2\n1,2\n3,4\n").values()(1, 0) == 4 - 1);
  CHECK_THROWS_AS(parse("1,2\n"), DataError);
  CHECK_THROWS_AS(parse("# dims=2\n1,2\n"), DataError);
  CHECK_THROWS_AS(parse("# dims=2 length=3\n1,2\n3,4\n"), DataError);
  CHECK_THROWS_AS(parse("# dims=2 length=1\n1,2\n3,4\n"), DataError);
  CHECK_THROWS_AS(parse("# dims=2 length=1\n1,2,3\n"), DimensionError);
  CHECK_THROWS_AS(parse("# dims=2 length=1\n1,abc\n"), DataError);
  CHECK_THROWS_AS(parse("# dims=2 length=1\n1,nan\n"), DataError);
  CHECK_THROWS_AS(parse("# dims=0 length=1\n\n"), DataError);
  CHECK_THROWS_AS(load_series("/nonexistent/dir/x.csv"), DataError);
}

TEST_CASE("result tables round-trip through CSV unchanged") {
  ResultTable t({"method", "theta", "cost"});
  t.add_row({"dtw", format_double(0.5), format_double(1.0 / 3.0)});
  t.add_row({"dtw-gi, stiefel", "1", "\"quoted\""});
  std::stringstream ss;
  t.write(ss);
  const std::string text = ss.str();
  const ResultTable back = ResultTable::read(ss);
  CHECK(back == t);
  std::stringstream again;
  back.write(again);
  CHECK(again.str() == text);
  CHECK(back.numeric_column("theta")[1] == 1.0);
  CHECK(back.column("method")[1] == "dtw-gi, stiefel");
  CHECK_THROWS_AS(t.add_row({"too", "short"}), ConfigError);
  CHECK_THROWS_AS(t.column("missing"), ConfigError);

  std::istringstream ragged("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(ResultTable::read(ragged), DataError);
}
