#include "geomsg/cell/cell_db.hpp"

#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::cell {

CellIdentity CellIdentity::make(std::int64_t mcc, std::int64_t mnc,
                                std::int64_t lac, std::int64_t cid) {
  auto check = [](const char* name, std::int64_t v, std::uint32_t max) {
    if (v < 0 || v > static_cast<std::int64_t>(max)) {
      throw Error(Errc::validation,
                  fmt::format("{} {} outside 0..{}", name, v, max));
    }
    return static_cast<std::uint32_t>(v);
  };
  return CellIdentity{check("mcc", mcc, kMaxMcc), check("mnc", mnc, kMaxMnc),
                      check("lac", lac, kMaxLac), check("cid", cid, kMaxCid)};
}

std::string to_string(const CellIdentity& id) {
  return fmt::format("{}-{}-{}-{}", id.mcc, id.mnc, id.lac, id.cid);
}

const char* to_string(CellSource source) {
  return source == CellSource::local_db ? "local_db" : "external";
}

void FixtureResolver::add(const CellIdentity& id, geo::GeoPoint point,
                          SimTime latency) {
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(id, std::make_pair(point, latency));
}

ResolverReply FixtureResolver::lookup(const CellIdentity& id) {
  std::unique_lock lock(mutex_);
  ++calls_;
  const auto it = entries_.find(id);
  if (it == entries_.end()) return ResolverReply{std::nullopt, SimTime()};
  return ResolverReply{it->second.first, it->second.second};
}

std::size_t FixtureResolver::calls() const {
  std::shared_lock lock(mutex_);
  return calls_;
}

CellDatabase::CellDatabase(std::shared_ptr<ExternalResolver> resolver,
                           SimTime timeout)
    : resolver_(std::move(resolver)), timeout_(timeout) {}

void CellDatabase::set_resolver(std::shared_ptr<ExternalResolver> resolver) {
  std::unique_lock lock(mutex_);
  resolver_ = std::move(resolver);
}

void CellDatabase::set_timeout(SimTime timeout) {
  std::unique_lock lock(mutex_);
  timeout_ = timeout;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_field(std::string_view text, T& out) {
  text = trim(text);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

bool looks_like_header(std::string_view line) {
  const auto fields = split(line, ',');
  std::int64_t ignored = 0;
  return !fields.empty() && !parse_field(fields[0], ignored);
}

}  // namespace

std::size_t CellDatabase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::storage, fmt::format("cannot open cell database '{}'",
                                           path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_text(buffer.str());
}

std::size_t CellDatabase::load_text(const std::string& text) {
  std::map<CellIdentity, CellRecord> fresh;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (rows == 0 && fresh.empty() && line_no == 1 && looks_like_header(line)) {
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 6) {
      throw Error(Errc::parse, fmt::format("line {}: expected 6 fields, got {}",
                                           line_no, fields.size()));
    }
    std::int64_t ints[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_field(fields[i], ints[i])) {
        throw Error(Errc::parse, fmt::format("line {}: bad integer '{}'",
                                             line_no, trim(fields[i])));
      }
    }
    double lat = 0.0;
    double lon = 0.0;
    if (!parse_field(fields[4], lat) || !parse_field(fields[5], lon)) {
      throw Error(Errc::parse, fmt::format("line {}: bad coordinate", line_no));
    }
    try {
      const auto id = CellIdentity::make(ints[0], ints[1], ints[2], ints[3]);
      fresh.insert_or_assign(
          id, CellRecord{id, geo::GeoPoint(lat, lon), CellSource::local_db});
    } catch (const Error& e) {
      throw Error(Errc::validation, fmt::format("line {}: {}", line_no, e.what()));
    }
    ++rows;
  }
  std::unique_lock lock(mutex_);
  table_ = std::move(fresh);
  return table_.size();
}

void CellDatabase::insert(const CellIdentity& id, geo::GeoPoint point,
                          CellSource source) {
  std::unique_lock lock(mutex_);
  table_.insert_or_assign(id, CellRecord{id, point, source});
}

CellRecord CellDatabase::resolve(const CellIdentity& id) {
  std::shared_ptr<ExternalResolver> resolver;
  SimTime timeout;
  {
    std::shared_lock lock(mutex_);
    if (const auto it = table_.find(id); it != table_.end()) {
      CellRecord hit = it->second;
      hit.source = CellSource::local_db;
      return hit;
    }
    resolver = resolver_;
    timeout = timeout_;
  }
  if (resolver) {
    const ResolverReply reply = resolver->lookup(id);
    if (reply.point && reply.latency <= timeout) {
      std::unique_lock lock(mutex_);
      // Another thread may have resolved it meanwhile; keep the first entry.
      const auto [it, inserted] =
          table_.try_emplace(id, CellRecord{id, *reply.point, CellSource::external});
      CellRecord out = it->second;
      out.source = inserted ? CellSource::external : CellSource::local_db;
      return out;
    }
  }
  throw Error(Errc::not_found, fmt::format("unknown cell {}", to_string(id)));
}

std::size_t CellDatabase::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

std::vector<CellRecord> CellDatabase::records() const {
  std::shared_lock lock(mutex_);
  std::vector<CellRecord> out;
  out.reserve(table_.size());
  for (const auto& [id, record] : table_) out.push_back(record);
  return out;
}

}  // namespace geomsg::cell
