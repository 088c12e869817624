#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "rppl/raster.hpp"
#include "rppl/rng.hpp"

using namespace rppl;

namespace {

RasterGrid random_grid(Rng& rng, int rows, int cols) {
  RasterGrid g;
  g.n_rows = rows;
  g.n_cols = cols;
  g.x_origin = rng.uniform(-1000, 1000);
  g.y_origin = rng.uniform(-1000, 1000);
  g.cell_size = rng.uniform(0.5, 30.0);
  g.heights.resize(static_cast<size_t>(rows) * cols);
  for (auto& h : g.heights) h = rng.uniform(-50, 500);
  return g;
}

}  // namespace

TEST_CASE("parse_ascii_grid reads a 2x2 grid with top row first") {
  const std::string text =
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
      "1 2\n3 4\n";
  RasterGrid g = parse_ascii_grid(text);
  CHECK(g.n_cols == 2);
  CHECK(g.n_rows == 2);
  CHECK(g.at(0, 0) == 1.0);  // top row, first column
  CHECK(g.at(0, 1) == 2.0);
  CHECK(g.at(1, 0) == 3.0);
  CHECK(g.at(1, 1) == 4.0);
}

TEST_CASE("parse_ascii_grid accepts CRLF and case-insensitive headers") {
  const std::string text =
      "NCOLS 2\r\nNROWS 2\r\nXLLcorner 10\r\nYLLCORNER 20\r\nCellSize 5\r\nNODATA_value -9999\r\n"
      "1 2\r\n3 4\r\n";
  RasterGrid g = parse_ascii_grid(text);
  CHECK(g.x_origin == 10.0);
  CHECK(g.y_origin == 20.0);
  CHECK(g.cell_size == 5.0);
  REQUIRE(g.nodata_value.has_value());
  CHECK(*g.nodata_value == -9999.0);
}

TEST_CASE("declared nodata cells are an error when sampled") {
  const std::string text =
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -1\n"
      "-1 2\n3 4\n";
  RasterGrid g = parse_ascii_grid(text);
  CHECK(g.is_nodata(g.at(0, 0)));
  // the nodata cell is the top-left, i.e. cell (col 0, row 1 from bottom)
  CHECK_THROWS_AS(sample_bilinear(g, 1.0, 1.0), DomainError);
}

TEST_CASE("parser errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\n1 2\n3 4\n"),
                       doctest::Contains("cellsize"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_ascii_grid("ncols 2\nncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n"),
      doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3\n"),
      doctest::Contains("line 7"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_ascii_grid("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 abc\n"),
      doctest::Contains("abc"), ParseError);
}

TEST_CASE("write_ascii_grid of a single-cell grid re-parses equal") {
  RasterGrid g;
  g.n_cols = 1;
  g.n_rows = 1;
  g.cell_size = 1.0;
  g.heights = {5.0};
  const std::string text = write_ascii_grid(g);
  CHECK(text.find("5") != std::string::npos);
  CHECK(parse_ascii_grid(text) == g);
}

TEST_CASE("write_ascii_grid emits the nodata header when present") {
  RasterGrid g = testing::flat_grid(2, 1.0, 7.0);
  g.nodata_value = -9999.0;
  g.at(0, 0) = -9999.0;
  const std::string text = write_ascii_grid(g);
  CHECK(text.find("nodata_value -9999") != std::string::npos);
  CHECK(parse_ascii_grid(text) == g);
}

TEST_CASE("parse/write round-trip is exact on random grids") {
  Rng rng(7101);
  for (int trial = 0; trial < 20; ++trial) {
    RasterGrid g = random_grid(rng, 16, 16);
    RasterGrid back = parse_ascii_grid(write_ascii_grid(g));
    CHECK(back == g);
  }
}

TEST_CASE("sample_bilinear hits cell centers exactly") {
  const std::string text =
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
      "1 2\n3 4\n";
  RasterGrid g = parse_ascii_grid(text);
  // cell (0,0 from bottom) center = (0.5, 0.5), stored at the bottom row
  CHECK(sample_bilinear(g, 0.5, 0.5) == doctest::Approx(3.0));
  CHECK(sample_bilinear(g, 1.5, 1.5) == doctest::Approx(2.0));
}

TEST_CASE("sample_bilinear midpoint of adjacent centers is the average") {
  RasterGrid g = testing::flat_grid(2, 1.0, 0.0);
  g.at(1, 0) = 10.0;  // bottom-left
  g.at(1, 1) = 20.0;  // bottom-right
  g.at(0, 0) = 10.0;
  g.at(0, 1) = 20.0;
  CHECK(sample_bilinear(g, 1.0, 0.5) == doctest::Approx(15.0));
}

TEST_CASE("sample_bilinear matches an independent weighted-sum oracle") {
  Rng rng(90210);
  RasterGrid g = random_grid(rng, 24, 31);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(g.min_center_x(), g.max_center_x());
    const double y = rng.uniform(g.min_center_y(), g.max_center_y());

    // independent nearest-4 weighted sum, written against the grid contract
    const double cx = (x - g.x_origin) / g.cell_size - 0.5;
    const double cy = (y - g.y_origin) / g.cell_size - 0.5;
    int c0 = std::min(static_cast<int>(std::floor(cx)), g.n_cols - 2);
    int r0 = std::min(static_cast<int>(std::floor(cy)), g.n_rows - 2);
    c0 = std::max(c0, 0);
    r0 = std::max(r0, 0);
    const double wx = cx - c0, wy = cy - r0;
    auto cell = [&](int c, int r_bottom) { return g.at(g.n_rows - 1 - r_bottom, c); };
    const double expected = cell(c0, r0) * (1 - wx) * (1 - wy) + cell(c0 + 1, r0) * wx * (1 - wy) +
                            cell(c0, r0 + 1) * (1 - wx) * wy + cell(c0 + 1, r0 + 1) * wx * wy;

    CHECK(sample_bilinear(g, x, y) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("sample_bilinear is continuous") {
  Rng rng(3141);
  RasterGrid g = random_grid(rng, 16, 16);
  double lo = *std::min_element(g.heights.begin(), g.heights.end());
  double hi = *std::max_element(g.heights.begin(), g.heights.end());
  const double tolerance = (hi - lo) * 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(g.min_center_x(), g.max_center_x() - 1e-5);
    const double y = rng.uniform(g.min_center_y(), g.max_center_y() - 1e-5);
    const double a = sample_bilinear(g, x, y);
    const double b = sample_bilinear(g, x + 1e-6, y + 1e-6);
    CHECK(std::abs(a - b) <= tolerance);
  }
}

TEST_CASE("sample_bilinear rejects out-of-extent points") {
  RasterGrid g = testing::flat_grid(4, 1.0, 1.0);
  CHECK_THROWS_AS(sample_bilinear(g, -0.1, 2.0), DomainError);
  CHECK_THROWS_AS(sample_bilinear(g, 2.0, 3.9), DomainError);
  CHECK_NOTHROW(sample_bilinear(g, 0.5, 0.5));
  CHECK_NOTHROW(sample_bilinear(g, 3.5, 3.5));
}

TEST_CASE("parser survives arbitrary bytes") {
  Rng rng(555);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t len = static_cast<size_t>(rng.uniform_index(200));
    std::string junk(len, '\0');
    for (auto& c : junk) c = static_cast<char>(rng.uniform_index(256));
    try {
      RasterGrid g = parse_ascii_grid(junk);
      g.validate();  // if it parsed, it must be coherent
    } catch (const ParseError&) {
      // structured failure is the expected outcome
    }
  }
}
