#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "rppl/errors.hpp"

namespace rppl {

/// One measured or synthesized link. Positions share the CRS of the rasters
/// they are sampled against; antenna heights are meters above ground.
struct LinkRecord {
  double tx_x = 0.0;
  double tx_y = 0.0;
  double rx_x = 0.0;
  double rx_y = 0.0;
  double tx_height_agl = 0.0;
  double rx_height_agl = 0.0;
  double frequency_mhz = 0.0;
  double path_loss_db = 0.0;
  std::string region_id;
  std::string band_id;

  double horizontal_distance() const {
    return std::hypot(rx_x - tx_x, rx_y - tx_y);
  }

  /// Tx/Rx roles exchanged. Path loss is reciprocal so the label is kept.
  LinkRecord swapped() const {
    LinkRecord s = *this;
    std::swap(s.tx_x, s.rx_x);
    std::swap(s.tx_y, s.rx_y);
    std::swap(s.tx_height_agl, s.rx_height_agl);
    return s;
  }

  /// Throws DomainError when an invariant is violated; message names the
  /// offending field.
  void validate() const;

  bool operator==(const LinkRecord&) const = default;
};

struct LinkRowError {
  long line = 0;
  std::string message;
};

/// Result of parsing a link CSV: valid rows in file order, plus one located
/// error per invalid row. Invalid rows are never silently dropped.
struct LinkCsvResult {
  std::vector<LinkRecord> records;
  std::vector<LinkRowError> errors;
};

inline constexpr const char* kLinkCsvHeader =
    "tx_x,tx_y,tx_h,rx_x,rx_y,rx_h,freq_mhz,path_loss_db,region,band";

/// Parse a UTF-8, comma-separated link table. The header row must name all
/// required columns (any order, extras rejected). File-level problems
/// (missing header/column) throw ParseError; per-row problems are collected.
LinkCsvResult parse_link_csv(std::istream& in);
LinkCsvResult parse_link_csv(const std::string& text);

void write_link_csv(const std::vector<LinkRecord>& records, std::ostream& out);

std::vector<LinkRecord> load_link_csv(const std::string& path);
void save_link_csv(const std::vector<LinkRecord>& records, const std::string& path);

}  // namespace rppl
