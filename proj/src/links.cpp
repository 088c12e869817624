#include "rppl/links.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rppl/raster.hpp"  // format_double

namespace rppl {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

constexpr std::array<const char*, 10> kColumns = {
    "tx_x", "tx_y", "tx_h", "rx_x", "rx_y", "rx_h", "freq_mhz", "path_loss_db", "region", "band"};

}  // namespace

void LinkRecord::validate() const {
  for (double v : {tx_x, tx_y, rx_x, rx_y, tx_height_agl, rx_height_agl, frequency_mhz}) {
    if (!std::isfinite(v)) throw DomainError("non-finite link coordinate or height");
  }
  if (!(tx_height_agl > 0.0)) throw DomainError("tx_h must be > 0");
  if (!(rx_height_agl > 0.0)) throw DomainError("rx_h must be > 0");
  if (!(frequency_mhz > 0.0)) throw DomainError("freq_mhz must be > 0");
  if (!std::isfinite(path_loss_db)) throw DomainError("path_loss_db must be finite");
  double d3 = std::hypot(horizontal_distance(), tx_height_agl - rx_height_agl);
  if (!(d3 > 0.0)) throw DomainError("link distance must be > 0");
}

LinkCsvResult parse_link_csv(std::istream& in) {
  std::string line;
  long line_no = 0;

  // Header
  std::map<std::string, size_t> col_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    for (size_t i = 0; i < fields.size(); ++i) {
      std::string name = trim(fields[i]);
      if (col_index.count(name))
        throw ParseError("duplicate column '" + name + "'", line_no);
      col_index[name] = i;
    }
    break;
  }
  if (col_index.empty()) throw ParseError("missing header row", std::max(line_no, 1L));
  for (const char* col : kColumns) {
    if (!col_index.count(col))
      throw ParseError(std::string("missing column '") + col + "'", line_no);
  }
  for (const auto& [name, idx] : col_index) {
    (void)idx;
    if (std::find(kColumns.begin(), kColumns.end(), name) == kColumns.end())
      throw ParseError("unknown column '" + name + "'", line_no);
  }
  const size_t n_cols = col_index.size();

  LinkCsvResult result;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != n_cols) {
      result.errors.push_back({line_no, "row has " + std::to_string(fields.size()) +
                                            " fields, expected " + std::to_string(n_cols)});
      continue;
    }
    auto text = [&](const char* col) { return trim(fields[col_index.at(col)]); };

    LinkRecord rec;
    rec.region_id = text("region");
    rec.band_id = text("band");
    bool numeric_ok = true;
    auto num = [&](const char* col, double& out) {
      if (!parse_double(text(col), out)) {
        result.errors.push_back({line_no, std::string("non-numeric field '") + col + "': '" +
                                              text(col) + "'"});
        numeric_ok = false;
      }
    };
    num("tx_x", rec.tx_x);
    num("tx_y", rec.tx_y);
    num("tx_h", rec.tx_height_agl);
    num("rx_x", rec.rx_x);
    num("rx_y", rec.rx_y);
    num("rx_h", rec.rx_height_agl);
    num("freq_mhz", rec.frequency_mhz);
    num("path_loss_db", rec.path_loss_db);
    if (!numeric_ok) continue;

    try {
      rec.validate();
    } catch (const DomainError& e) {
      result.errors.push_back({line_no, e.what()});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

LinkCsvResult parse_link_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_link_csv(in);
}

void write_link_csv(const std::vector<LinkRecord>& records, std::ostream& out) {
  out << kLinkCsvHeader << "\n";
  for (const auto& r : records) {
    out << format_double(r.tx_x) << ',' << format_double(r.tx_y) << ','
        << format_double(r.tx_height_agl) << ',' << format_double(r.rx_x) << ','
        << format_double(r.rx_y) << ',' << format_double(r.rx_height_agl) << ','
        << format_double(r.frequency_mhz) << ',' << format_double(r.path_loss_db) << ','
        << r.region_id << ',' << r.band_id << "\n";
  }
}

std::vector<LinkRecord> load_link_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open link csv: " + path);
  LinkCsvResult res = parse_link_csv(in);
  if (!res.errors.empty()) {
    throw ParseError("link csv '" + path + "' has " + std::to_string(res.errors.size()) +
                         " invalid rows; first: " + res.errors.front().message,
                     res.errors.front().line);
  }
  return std::move(res.records);
}

void save_link_csv(const std::vector<LinkRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write link csv: " + path);
  write_link_csv(records, out);
}

}  // namespace rppl
