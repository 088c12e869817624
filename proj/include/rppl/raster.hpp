#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rppl/errors.hpp"

namespace rppl {

/// Regular elevation grid (DSM or DTM). Values are cell-center heights in
/// meters above sea level, stored row-major with the *top* (northernmost)
/// row first, matching the on-disk ASCII layout. (x_origin, y_origin) is the
/// lower-left corner of the lower-left cell, so the center of cell
/// (col c, row r counted from the bottom) sits at
///   (x_origin + (c + 0.5) * cell_size, y_origin + (r + 0.5) * cell_size).
struct RasterGrid {
  int n_cols = 0;
  int n_rows = 0;
  double x_origin = 0.0;
  double y_origin = 0.0;
  double cell_size = 1.0;
  std::optional<double> nodata_value;
  std::vector<double> heights;  // n_rows * n_cols, top row first

  double at(int row_top, int col) const { return heights[static_cast<size_t>(row_top) * n_cols + col]; }
  double& at(int row_top, int col) { return heights[static_cast<size_t>(row_top) * n_cols + col]; }

  bool is_nodata(double v) const { return nodata_value && v == *nodata_value; }

  /// Rectangle of cell centers; bilinear sampling is defined inside it.
  double min_center_x() const { return x_origin + 0.5 * cell_size; }
  double max_center_x() const { return x_origin + (n_cols - 0.5) * cell_size; }
  double min_center_y() const { return y_origin + 0.5 * cell_size; }
  double max_center_y() const { return y_origin + (n_rows - 0.5) * cell_size; }

  /// Throws ConfigError if the shape/metadata are inconsistent or any
  /// non-sentinel height is not finite. Grids of at least 2x2 cells are
  /// required for bilinear sampling; 1x1 grids are representable and
  /// round-trip through the ASCII format but cannot be sampled.
  void validate() const;

  bool operator==(const RasterGrid& other) const;
};

/// Parse an ESRI ASCII grid. Header keys (ncols, nrows, xllcorner,
/// yllcorner, cellsize, optional nodata_value) are case-insensitive; both
/// "\n" and "\r\n" line endings are accepted. Data rows are stored top row
/// first, exactly as they appear in the stream.
/// Throws ParseError (with line number) on missing/duplicate header keys,
/// wrong column counts, or non-numeric tokens. Never crashes on arbitrary
/// bytes.
RasterGrid parse_ascii_grid(std::istream& in);
RasterGrid parse_ascii_grid(const std::string& text);

/// Inverse of parse_ascii_grid: output re-parses to a grid that compares
/// equal (header fields and every height exact).
void write_ascii_grid(const RasterGrid& grid, std::ostream& out);
std::string write_ascii_grid(const RasterGrid& grid);

RasterGrid load_ascii_grid(const std::string& path);
void save_ascii_grid(const RasterGrid& grid, const std::string& path);

/// Bilinear interpolation of the four surrounding cell-center heights.
/// Throws DomainError if (x, y) falls outside the cell-center rectangle or
/// any of the four neighbors is nodata.
double sample_bilinear(const RasterGrid& grid, double x, double y);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace rppl
