#include <doctest.h>

#include <sstream>

#include "rppl/links.hpp"

using namespace rppl;

TEST_CASE("parse_link_csv reads a valid row back") {
  const std::string text =
      "tx_x,tx_y,tx_h,rx_x,rx_y,rx_h,freq_mhz,path_loss_db,region,band\n"
      "0,0,17,1000,0,1.5,3602,120,London,3602\n";
  LinkCsvResult res = parse_link_csv(text);
  REQUIRE(res.records.size() == 1);
  CHECK(res.errors.empty());
  const LinkRecord& r = res.records[0];
  CHECK(r.tx_x == 0.0);
  CHECK(r.tx_height_agl == 17.0);
  CHECK(r.rx_x == 1000.0);
  CHECK(r.rx_height_agl == 1.5);
  CHECK(r.frequency_mhz == 3602.0);
  CHECK(r.path_loss_db == 120.0);
  CHECK(r.region_id == "London");
  CHECK(r.band_id == "3602");
}

TEST_CASE("columns may appear in any order") {
  const std::string text =
      "band,region,path_loss_db,freq_mhz,rx_h,rx_y,rx_x,tx_h,tx_y,tx_x\n"
      "b,A,100,915,1.5,0,500,17,0,0\n";
  LinkCsvResult res = parse_link_csv(text);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].rx_x == 500.0);
  CHECK(res.records[0].frequency_mhz == 915.0);
}

TEST_CASE("zero frequency is a row-level validation error") {
  const std::string text =
      "tx_x,tx_y,tx_h,rx_x,rx_y,rx_h,freq_mhz,path_loss_db,region,band\n"
      "0,0,17,1000,0,1.5,0,120,A,b\n";
  LinkCsvResult res = parse_link_csv(text);
  CHECK(res.records.empty());
  REQUIRE(res.errors.size() == 1);
  CHECK(res.errors[0].line == 2);
  CHECK(res.errors[0].message.find("freq") != std::string::npos);
}

TEST_CASE("invalid rows are reported, valid rows kept") {
  const std::string text =
      "tx_x,tx_y,tx_h,rx_x,rx_y,rx_h,freq_mhz,path_loss_db,region,band\n"
      "0,0,17,1000,0,1.5,3602,120,A,b\n"
      "0,0,17,900,0,1.5,oops,121,A,b\n"
      "0,0,17,800,0,1.5,915,122,A,b\n"
      "0,0,17,700,0,1.5,449,123,A,b\n";
  LinkCsvResult res = parse_link_csv(text);
  CHECK(res.records.size() == 3);
  REQUIRE(res.errors.size() == 1);
  CHECK(res.errors[0].line == 3);
}

TEST_CASE("missing column is a file-level error") {
  CHECK_THROWS_WITH_AS(parse_link_csv("tx_x,tx_y,tx_h,rx_x,rx_y,rx_h,freq_mhz,path_loss_db,region\n"),
                       doctest::Contains("band"), ParseError);
}

TEST_CASE("zero-distance links are rejected") {
  const std::string text =
      "tx_x,tx_y,tx_h,rx_x,rx_y,rx_h,freq_mhz,path_loss_db,region,band\n"
      "5,5,10,5,5,10,915,100,A,b\n";
  LinkCsvResult res = parse_link_csv(text);
  CHECK(res.records.empty());
  REQUIRE(res.errors.size() == 1);
  CHECK(res.errors[0].message.find("distance") != std::string::npos);
}

TEST_CASE("link csv write/parse round-trip") {
  LinkRecord a;
  a.tx_x = 12.25;
  a.tx_y = -3.5;
  a.rx_x = 801.0;
  a.rx_y = 44.125;
  a.tx_height_agl = 17.0;
  a.rx_height_agl = 1.5;
  a.frequency_mhz = 2695.0;
  a.path_loss_db = 131.0625;
  a.region_id = "r3";
  a.band_id = "2695";
  std::ostringstream out;
  write_link_csv({a}, out);
  LinkCsvResult res = parse_link_csv(out.str());
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0] == a);
}
