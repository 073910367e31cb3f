#include "geomsg/sig/link_store.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::sig {

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

std::string encode_short_code(std::uint64_t counter) {
  std::string code(kShortCodeLength, '0');
  for (std::size_t i = kShortCodeLength; i-- > 0 && counter > 0;) {
    code[i] = kBase62Alphabet[counter % 62];
    counter /= 62;
  }
  if (counter > 0) {
    throw Error(Errc::storage, "short code space exhausted");
  }
  return code;
}

LinkStore::LinkStore(Clock clock) : clock_(std::move(clock)) {}

LinkStore::LinkStore(std::filesystem::path log_path, Clock clock)
    : log_path_(std::move(log_path)), clock_(std::move(clock)) {
  replay();
}

namespace {

bool is_absolute_url(const std::string& target) {
  const auto colon = target.find("://");
  if (colon == std::string::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    const char c = target[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.')) {
      return false;
    }
  }
  return target.size() > colon + 3 &&
         target.find_first_of(" \t\r\n") == std::string::npos;
}

}  // namespace

void LinkStore::replay() {
  std::ifstream in(*log_path_);
  if (!in) return;  // no log yet
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    std::string code;
    Timestamp ts = 0;
    fields >> tag >> code >> ts;
    if (!fields) {
      throw Error(Errc::storage, fmt::format("{}:{}: malformed record",
                                             log_path_->string(), line_no));
    }
    if (tag == "S") {
      std::string target;
      fields >> target;
      if (target.empty()) {
        throw Error(Errc::storage, fmt::format("{}:{}: link without target",
                                               log_path_->string(), line_no));
      }
      apply_link(ShortLink{code, target, ts, {}});
    } else if (tag == "C") {
      const auto it = by_code_.find(code);
      if (it == by_code_.end()) {
        throw Error(Errc::storage, fmt::format("{}:{}: click for unknown code {}",
                                               log_path_->string(), line_no, code));
      }
      ClickEvent click{ts, std::nullopt};
      double lat = 0.0;
      double lon = 0.0;
      if (fields >> lat >> lon) click.context = geo::GeoPoint(lat, lon);
      it->second.clicks.push_back(click);
    } else {
      throw Error(Errc::storage, fmt::format("{}:{}: unknown record tag '{}'",
                                             log_path_->string(), line_no, tag));
    }
  }
}

void LinkStore::apply_link(ShortLink link) {
  // Codes are counter values; the counter resumes after the highest one.
  std::uint64_t value = 0;
  for (char c : link.code) value = value * 62 + kBase62Alphabet.find(c);
  counter_ = std::max(counter_, value);
  code_by_target_[link.target] = link.code;
  by_code_[link.code] = std::move(link);
}

void LinkStore::append(const std::string& line) {
  if (!log_path_) return;
  std::ofstream out(*log_path_, std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) {
    throw Error(Errc::storage,
                fmt::format("cannot append to link store '{}'", log_path_->string()));
  }
}

ShortLink LinkStore::shorten(const std::string& target) {
  if (target.empty()) throw Error(Errc::validation, "empty shortener target");
  if (!is_absolute_url(target)) {
    throw Error(Errc::validation,
                fmt::format("shortener target is not an absolute URL: '{}'", target));
  }
  std::lock_guard lock(mutex_);
  if (const auto it = code_by_target_.find(target); it != code_by_target_.end()) {
    return by_code_.at(it->second);
  }
  ShortLink link{encode_short_code(counter_ + 1), target, clock_(), {}};
  append(fmt::format("S {} {} {}", link.code, link.created_at, link.target));
  apply_link(link);
  return link;
}

std::size_t LinkStore::record_click(const std::string& code,
                                    const std::optional<geo::GeoPoint>& context) {
  std::lock_guard lock(mutex_);
  const auto it = by_code_.find(code);
  if (it == by_code_.end()) {
    throw Error(Errc::not_found, fmt::format("unknown short code '{}'", code));
  }
  const Timestamp now = clock_();
  if (now < it->second.created_at) {
    throw Error(Errc::validation,
                fmt::format("click at {} precedes link creation at {}", now,
                            it->second.created_at));
  }
  std::string line = fmt::format("C {} {}", code, now);
  if (context) line += " " + geo::format_coords(*context);
  append(line);
  it->second.clicks.push_back(ClickEvent{now, context});
  return it->second.clicks.size();
}

std::optional<ShortLink> LinkStore::find(const std::string& code) const {
  std::lock_guard lock(mutex_);
  const auto it = by_code_.find(code);
  if (it == by_code_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> LinkStore::resolve(const std::string& code) const {
  std::lock_guard lock(mutex_);
  const auto it = by_code_.find(code);
  if (it == by_code_.end()) return std::nullopt;
  return it->second.target;
}

std::size_t LinkStore::size() const {
  std::lock_guard lock(mutex_);
  return by_code_.size();
}

std::size_t LinkStore::total_clicks() const {
  std::lock_guard lock(mutex_);
  std::size_t total = 0;
  for (const auto& [code, link] : by_code_) total += link.clicks.size();
  return total;
}

}  // namespace geomsg::sig
