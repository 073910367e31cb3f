#include "geomsg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw Error(Errc::config, fmt::format("{}: bad number '{}'", key, value));
  }
  return out;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  if (key == "map_url_template") map_url_template = value;
  else if (key == "map_zoom") map_zoom = number<int>(key, value);
  else if (key == "short_url_base") short_url_base = value;
  else if (key == "landing_url_template") landing_url_template = value;
  else if (key == "movement_threshold_m") movement_threshold_m = number<double>(key, value);
  else if (key == "sms_limit") sms_limit = number<std::size_t>(key, value);
  else if (key == "retransmit_timer_s") retransmit_timer_s = number<double>(key, value);
  else if (key == "max_retries") max_retries = number<int>(key, value);
  else if (key == "pos_rounds") pos_rounds = number<int>(key, value);
  else if (key == "walking_speed_mps") walking_speed_mps = number<double>(key, value);
  else if (key == "rng_seed") rng_seed = number<std::uint64_t>(key, value);
  else if (key == "grant_window_s") grant_window_s = number<double>(key, value);
  else if (key == "link_store_path") link_store_path = value;
  else if (key == "flow_store_path") flow_store_path = value;
  else if (key == "cell_db_path") cell_db_path = value;
  else throw Error(Errc::config, fmt::format("unknown config key '{}'", key));
}

void Config::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0)) {
      throw Error(Errc::config, fmt::format("{} must be positive, got {}", name, v));
    }
  };
  positive("movement_threshold_m", movement_threshold_m);
  positive("sms_limit", static_cast<double>(sms_limit));
  positive("retransmit_timer_s", retransmit_timer_s);
  positive("max_retries", max_retries);
  positive("pos_rounds", pos_rounds);
  positive("walking_speed_mps", walking_speed_mps);
  positive("rng_seed", static_cast<double>(rng_seed));
  positive("grant_window_s", grant_window_s);
  // Constructing the builder checks the template placeholders.
  sig::MapUrlBuilder(map_url_template, map_zoom);
  if (short_url_base.empty()) throw Error(Errc::config, "short_url_base is empty");
}

Config parse_config(const std::string& text, Config base) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::config, fmt::format("line {}: expected key=value", line_no));
    }
    try {
      base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(Errc::config, fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  base.validate();
  return base;
}

Config load_config(const std::filesystem::path& path, Config base) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::config, fmt::format("cannot read config '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

}  // namespace geomsg
