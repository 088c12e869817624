#pragma once

#include <json.hpp>

#include "rppl/links.hpp"
#include "rppl/profile.hpp"

namespace rppl {

using json = nlohmann::json;

inline void to_json(json& j, const LinkRecord& r) {
  j = json{{"tx_x", r.tx_x},
           {"tx_y", r.tx_y},
           {"tx_h", r.tx_height_agl},
           {"rx_x", r.rx_x},
           {"rx_y", r.rx_y},
           {"rx_h", r.rx_height_agl},
           {"freq_mhz", r.frequency_mhz},
           {"path_loss_db", r.path_loss_db},
           {"region", r.region_id},
           {"band", r.band_id}};
}

inline void from_json(const json& j, LinkRecord& r) {
  j.at("tx_x").get_to(r.tx_x);
  j.at("tx_y").get_to(r.tx_y);
  j.at("tx_h").get_to(r.tx_height_agl);
  j.at("rx_x").get_to(r.rx_x);
  j.at("rx_y").get_to(r.rx_y);
  j.at("rx_h").get_to(r.rx_height_agl);
  j.at("freq_mhz").get_to(r.frequency_mhz);
  j.at("path_loss_db").get_to(r.path_loss_db);
  j.at("region").get_to(r.region_id);
  j.at("band").get_to(r.band_id);
}

inline void to_json(json& j, const ProfileConfig& c) {
  j = json{{"length_samples", c.length_samples},
           {"transverse_samples", c.transverse_samples},
           {"transverse_halfwidth", c.transverse_halfwidth},
           {"h_max", c.h_max},
           {"d_max", c.d_max},
           {"f_min_mhz", c.f_min_mhz},
           {"f_max_mhz", c.f_max_mhz}};
}

inline void from_json(const json& j, ProfileConfig& c) {
  j.at("length_samples").get_to(c.length_samples);
  j.at("transverse_samples").get_to(c.transverse_samples);
  j.at("transverse_halfwidth").get_to(c.transverse_halfwidth);
  j.at("h_max").get_to(c.h_max);
  j.at("d_max").get_to(c.d_max);
  j.at("f_min_mhz").get_to(c.f_min_mhz);
  j.at("f_max_mhz").get_to(c.f_max_mhz);
}

}  // namespace rppl
