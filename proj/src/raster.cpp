#include "rppl/raster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace rppl {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view tok, long& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

struct Line {
  std::string text;
  long number = 0;
};

// Splits on '\n', strips a trailing '\r'.
std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  long num = 0;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    lines.push_back({raw, ++num});
  }
  return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

void RasterGrid::validate() const {
  if (n_cols < 1 || n_rows < 1) throw ConfigError("raster dimensions must be positive");
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be > 0");
  if (heights.size() != static_cast<size_t>(n_cols) * static_cast<size_t>(n_rows))
    throw ConfigError("height count does not match n_rows * n_cols");
  for (double h : heights) {
    if (!is_nodata(h) && !std::isfinite(h))
      throw ConfigError("non-finite height outside the nodata sentinel");
  }
}

bool RasterGrid::operator==(const RasterGrid& other) const {
  return n_cols == other.n_cols && n_rows == other.n_rows &&
         x_origin == other.x_origin && y_origin == other.y_origin &&
         cell_size == other.cell_size && nodata_value == other.nodata_value &&
         heights == other.heights;
}

RasterGrid parse_ascii_grid(std::istream& in) {
  const std::vector<Line> lines = read_lines(in);

  std::map<std::string, double> header;
  std::map<std::string, long> header_line;
  size_t li = 0;
  for (; li < lines.size(); ++li) {
    auto toks = split_ws(lines[li].text);
    if (toks.empty()) continue;
    // Header lines start with a key; data rows start with a number.
    double probe;
    if (parse_double(toks[0], probe)) break;
    std::string key = to_lower(std::string(toks[0]));
    if (toks.size() != 2)
      throw ParseError("header key '" + key + "' expects exactly one value", lines[li].number);
    double value;
    if (!parse_double(toks[1], value))
      throw ParseError("non-numeric header value '" + std::string(toks[1]) + "'", lines[li].number);
    if (header.count(key))
      throw ParseError("duplicate header key '" + key + "'", lines[li].number);
    header[key] = value;
    header_line[key] = lines[li].number;
  }

  for (const char* key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
    if (!header.count(key))
      throw ParseError(std::string("missing header key '") + key + "'",
                       lines.empty() ? 1 : lines.back().number);
  }
  for (const auto& [key, value] : header) {
    (void)value;
    static const std::vector<std::string> known = {"ncols",    "nrows",    "xllcorner",
                                                   "yllcorner", "cellsize", "nodata_value"};
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError("unknown header key '" + key + "'", header_line[key]);
  }

  RasterGrid grid;
  auto header_int = [&](const char* key) {
    double v = header[key];
    long n = static_cast<long>(v);
    if (static_cast<double>(n) != v || n < 1)
      throw ParseError(std::string("header key '") + key + "' must be a positive integer",
                       header_line[key]);
    return static_cast<int>(n);
  };
  grid.n_cols = header_int("ncols");
  grid.n_rows = header_int("nrows");
  grid.x_origin = header["xllcorner"];
  grid.y_origin = header["yllcorner"];
  grid.cell_size = header["cellsize"];
  if (!(grid.cell_size > 0.0))
    throw ParseError("cellsize must be > 0", header_line["cellsize"]);
  if (header.count("nodata_value")) grid.nodata_value = header["nodata_value"];

  grid.heights.reserve(static_cast<size_t>(grid.n_cols) * grid.n_rows);
  int rows_seen = 0;
  for (; li < lines.size(); ++li) {
    auto toks = split_ws(lines[li].text);
    if (toks.empty()) continue;
    if (rows_seen == grid.n_rows)
      throw ParseError("unexpected data past row " + std::to_string(grid.n_rows), lines[li].number);
    if (toks.size() != static_cast<size_t>(grid.n_cols))
      throw ParseError("row has " + std::to_string(toks.size()) + " columns, expected " +
                           std::to_string(grid.n_cols),
                       lines[li].number);
    for (auto tok : toks) {
      double v;
      if (!parse_double(tok, v))
        throw ParseError("non-numeric token '" + std::string(tok) + "'", lines[li].number);
      grid.heights.push_back(v);
    }
    ++rows_seen;
  }
  if (rows_seen != grid.n_rows)
    throw ParseError("expected " + std::to_string(grid.n_rows) + " data rows, found " +
                         std::to_string(rows_seen),
                     lines.empty() ? 1 : lines.back().number);

  try {
    grid.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), lines.empty() ? 1 : lines.back().number);
  }
  return grid;
}

RasterGrid parse_ascii_grid(const std::string& text) {
  std::istringstream in(text);
  return parse_ascii_grid(in);
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back;
    if (parse_double(buf, back) && back == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_ascii_grid(const RasterGrid& grid, std::ostream& out) {
  out << "ncols " << grid.n_cols << "\n";
  out << "nrows " << grid.n_rows << "\n";
  out << "xllcorner " << format_double(grid.x_origin) << "\n";
  out << "yllcorner " << format_double(grid.y_origin) << "\n";
  out << "cellsize " << format_double(grid.cell_size) << "\n";
  if (grid.nodata_value) out << "nodata_value " << format_double(*grid.nodata_value) << "\n";
  for (int r = 0; r < grid.n_rows; ++r) {
    for (int c = 0; c < grid.n_cols; ++c) {
      if (c) out << ' ';
      out << format_double(grid.at(r, c));
    }
    out << '\n';
  }
}

std::string write_ascii_grid(const RasterGrid& grid) {
  std::ostringstream out;
  write_ascii_grid(grid, out);
  return out.str();
}

RasterGrid load_ascii_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open raster file: " + path);
  return parse_ascii_grid(in);
}

void save_ascii_grid(const RasterGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write raster file: " + path);
  write_ascii_grid(grid, out);
}

double sample_bilinear(const RasterGrid& grid, double x, double y) {
  if (grid.n_cols < 2 || grid.n_rows < 2)
    throw DomainError("bilinear sampling requires a grid of at least 2x2 cells");
  if (x < grid.min_center_x() || x > grid.max_center_x() || y < grid.min_center_y() ||
      y > grid.max_center_y())
    throw DomainError("sample point (" + format_double(x) + ", " + format_double(y) +
                      ") outside raster extent");

  // Fractional cell-center coordinates, counted from the bottom-left center.
  double gx = (x - grid.x_origin) / grid.cell_size - 0.5;
  double gy = (y - grid.y_origin) / grid.cell_size - 0.5;
  int c0 = std::clamp(static_cast<int>(std::floor(gx)), 0, grid.n_cols - 2);
  int r0 = std::clamp(static_cast<int>(std::floor(gy)), 0, grid.n_rows - 2);
  double fx = gx - c0;
  double fy = gy - r0;

  auto h = [&](int col, int row_from_bottom) {
    return grid.at(grid.n_rows - 1 - row_from_bottom, col);
  };
  double h00 = h(c0, r0), h10 = h(c0 + 1, r0), h01 = h(c0, r0 + 1), h11 = h(c0 + 1, r0 + 1);
  for (double v : {h00, h10, h01, h11}) {
    if (grid.is_nodata(v))
      throw DomainError("nodata cell in bilinear neighborhood of (" + format_double(x) + ", " +
                        format_double(y) + ")");
  }
  return (1.0 - fx) * (1.0 - fy) * h00 + fx * (1.0 - fy) * h10 + (1.0 - fx) * fy * h01 +
         fx * fy * h11;
}

}  // namespace rppl
