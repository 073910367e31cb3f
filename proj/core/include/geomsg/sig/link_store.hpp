#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "geomsg/geo/point.hpp"

namespace geomsg::sig {

inline constexpr std::string_view kBase62Alphabet =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
inline constexpr std::size_t kShortCodeLength = 7;

// Seconds since the epoch.
using Timestamp = std::int64_t;
using Clock = std::function<Timestamp()>;

Clock system_clock();

struct ClickEvent {
  Timestamp timestamp = 0;
  std::optional<geo::GeoPoint> context;
};

struct ShortLink {
  std::string code;
  std::string target;
  Timestamp created_at = 0;
  std::vector<ClickEvent> clicks;
};

// Base-62 counter code, left-padded with '0' to seven characters.
std::string encode_short_code(std::uint64_t counter);

// URL shortener with click statistics.
//
// With a log path, every link and click is appended to the log before it is
// applied in memory, and constructing the store replays the log:
//
//   S <code> <created_at> <target>
//   C <code> <timestamp> [<lat> <lon>]
class LinkStore {
 public:
  explicit LinkStore(Clock clock = system_clock());
  LinkStore(std::filesystem::path log_path, Clock clock = system_clock());

  // Idempotent per target.
  ShortLink shorten(const std::string& target);

  // Returns the total clicks on `code` after appending this one.
  std::size_t record_click(const std::string& code,
                           const std::optional<geo::GeoPoint>& context = std::nullopt);

  std::optional<ShortLink> find(const std::string& code) const;
  std::optional<std::string> resolve(const std::string& code) const;
  std::size_t size() const;
  std::size_t total_clicks() const;

 private:
  void replay();
  void append(const std::string& line);
  void apply_link(ShortLink link);

  std::optional<std::filesystem::path> log_path_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::uint64_t counter_ = 0;
  std::map<std::string, ShortLink> by_code_;
  std::map<std::string, std::string> code_by_target_;
};

}  // namespace geomsg::sig
