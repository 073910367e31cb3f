#pragma once

#include <string>

#include "geomsg/geo/geohash.hpp"
#include "geomsg/geo/point.hpp"
#include "geomsg/sig/link_store.hpp"
#include "geomsg/sig/map_url.hpp"

namespace geomsg::sig {

enum class SignatureKind { map, landing, text };
const char* to_string(SignatureKind kind);
SignatureKind parse_signature_kind(std::string_view name);

struct GeoSignature {
  // The location actually shared: the raw point at exact level, otherwise
  // the center of the obfuscated cell.
  geo::GeoPoint point;
  geo::GeohashCell cell;
  std::string long_url;
  std::string short_url;
  SignatureKind kind = SignatureKind::map;

  // Short URL, or the coordinate text for kind=text.
  std::string rendered() const;
};

inline constexpr const char* kDefaultShortUrlBase = "https://g.mo/";
inline constexpr const char* kDefaultLandingUrlTemplate =
    "https://g.mo/at?ll={lat},{lon}&gh={geohash}";

// Builds signatures and registers their links with a shortener.
class Signer {
 public:
  struct Options {
    std::string short_url_base = kDefaultShortUrlBase;
    std::string landing_url_template = kDefaultLandingUrlTemplate;
  };

  Signer(MapUrlBuilder maps, LinkStore& links);
  Signer(MapUrlBuilder maps, LinkStore& links, Options options);

  GeoSignature sign(const geo::GeoPoint& p, geo::PrecisionLevel level,
                    SignatureKind kind = SignatureKind::map) const;

  // Maps a short URL produced by this signer back to its target.
  std::optional<std::string> expand(const std::string& short_url) const;

  const MapUrlBuilder& maps() const { return maps_; }
  LinkStore& links() const { return links_; }

 private:
  MapUrlBuilder maps_;
  LinkStore& links_;
  Options options_;
};

}  // namespace geomsg::sig
