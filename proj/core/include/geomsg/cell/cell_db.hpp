#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "geomsg/geo/point.hpp"
#include "geomsg/sim_time.hpp"

namespace geomsg::cell {

// GSM cell global identity as read from the SIM.
struct CellIdentity {
  std::uint32_t mcc = 0;
  std::uint32_t mnc = 0;
  std::uint32_t lac = 0;
  std::uint32_t cid = 0;

  static constexpr std::uint32_t kMaxMcc = 999;
  static constexpr std::uint32_t kMaxMnc = 999;
  static constexpr std::uint32_t kMaxLac = 65535;
  static constexpr std::uint32_t kMaxCid = 268435455;

  // Throws Errc::validation when a field is out of range.
  static CellIdentity make(std::int64_t mcc, std::int64_t mnc, std::int64_t lac,
                           std::int64_t cid);

  auto operator<=>(const CellIdentity&) const = default;
};

std::string to_string(const CellIdentity& id);

enum class CellSource { local_db, external };
const char* to_string(CellSource source);

struct CellRecord {
  CellIdentity identity;
  geo::GeoPoint point;
  CellSource source = CellSource::local_db;
};

struct ResolverReply {
  std::optional<geo::GeoPoint> point;
  // Simulated time the external service took to answer.
  SimTime latency;
};

// Client for an external cell-location service. Implementations must be
// callable from any thread.
class ExternalResolver {
 public:
  virtual ~ExternalResolver() = default;
  virtual ResolverReply lookup(const CellIdentity& id) = 0;
};

// Offline stand-in for the external service.
class FixtureResolver final : public ExternalResolver {
 public:
  void add(const CellIdentity& id, geo::GeoPoint point,
           SimTime latency = SimTime::from_seconds(0.05));

  ResolverReply lookup(const CellIdentity& id) override;

  std::size_t calls() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<CellIdentity, std::pair<geo::GeoPoint, SimTime>> entries_;
  std::size_t calls_ = 0;
};

// Local cell table with fall-through to an external resolver. Results from
// the resolver are memoized into the table.
class CellDatabase {
 public:
  CellDatabase() = default;
  explicit CellDatabase(std::shared_ptr<ExternalResolver> resolver,
                        SimTime timeout = SimTime::from_seconds(2.0));

  void set_resolver(std::shared_ptr<ExternalResolver> resolver);
  void set_timeout(SimTime timeout);

  // Rows are `mcc,mnc,lac,cid,lat,lon`; an optional header line is skipped.
  // Replaces the whole table, keeping the old one if any row is malformed.
  std::size_t load(const std::filesystem::path& path);
  std::size_t load_text(const std::string& text);

  void insert(const CellIdentity& id, geo::GeoPoint point,
              CellSource source = CellSource::local_db);

  // Throws Errc::not_found when neither the table nor the resolver knows it.
  CellRecord resolve(const CellIdentity& id);

  std::size_t size() const;
  // Snapshot in identity order.
  std::vector<CellRecord> records() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<CellIdentity, CellRecord> table_;
  std::shared_ptr<ExternalResolver> resolver_;
  SimTime timeout_ = SimTime::from_seconds(2.0);
};

}  // namespace geomsg::cell
