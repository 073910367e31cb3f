#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "geomsg/sig/map_url.hpp"
#include "geomsg/sig/signature.hpp"

namespace geomsg {

// Flat `key = value` settings shared by the command-line tools.
struct Config {
  std::string map_url_template = sig::kDefaultMapUrlTemplate;
  int map_zoom = 15;
  std::string short_url_base = sig::kDefaultShortUrlBase;
  std::string landing_url_template = sig::kDefaultLandingUrlTemplate;
  double movement_threshold_m = 25.0;
  std::size_t sms_limit = 140;
  double retransmit_timer_s = 10.0;
  int max_retries = 3;
  int pos_rounds = 2;
  double walking_speed_mps = 1.4;
  std::uint64_t rng_seed = 1;
  double grant_window_s = 3600.0;
  std::filesystem::path link_store_path = "geomsg_links.log";
  std::filesystem::path flow_store_path = "geomsg_flows.log";
  std::filesystem::path cell_db_path;

  // Applies one setting; throws Errc::config for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  // Throws Errc::config when a numeric field is not positive.
  void validate() const;
};

// Blank lines and '#' comments are ignored. Errors name the line.
Config parse_config(const std::string& text, Config base = {});
Config load_config(const std::filesystem::path& path, Config base = {});

}  // namespace geomsg
