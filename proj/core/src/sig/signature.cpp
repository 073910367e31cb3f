#include "geomsg/sig/signature.hpp"

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::sig {

const char* to_string(SignatureKind kind) {
  switch (kind) {
    case SignatureKind::map: return "map";
    case SignatureKind::landing: return "landing";
    case SignatureKind::text: return "text";
  }
  return "map";
}

SignatureKind parse_signature_kind(std::string_view name) {
  for (auto kind : {SignatureKind::map, SignatureKind::landing, SignatureKind::text}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(Errc::validation, fmt::format("unknown signature kind '{}'", name));
}

std::string GeoSignature::rendered() const {
  if (kind == SignatureKind::text) return geo::format_coords(point);
  return short_url;
}

Signer::Signer(MapUrlBuilder maps, LinkStore& links)
    : Signer(std::move(maps), links, Options{}) {}

Signer::Signer(MapUrlBuilder maps, LinkStore& links, Options options)
    : maps_(std::move(maps)), links_(links), options_(std::move(options)) {
  if (options_.short_url_base.empty()) {
    throw Error(Errc::config, "short_url_base is empty");
  }
}

GeoSignature Signer::sign(const geo::GeoPoint& p, geo::PrecisionLevel level,
                          SignatureKind kind) const {
  const auto full = geo::geohash_encode(p, geo::kMaxGeohashLength);
  auto cell = geo::obfuscate(full, level);
  const geo::GeoPoint shared =
      level == geo::PrecisionLevel::exact ? p : cell.center();

  std::string long_url;
  switch (kind) {
    case SignatureKind::map:
      long_url = maps_.build(shared);
      break;
    case SignatureKind::landing: {
      long_url = replace_all(options_.landing_url_template, "{lat}",
                             fmt::format("{:.6f}", shared.lat()));
      long_url = replace_all(std::move(long_url), "{lon}",
                             fmt::format("{:.6f}", shared.lon()));
      long_url = replace_all(std::move(long_url), "{geohash}", cell.code());
      break;
    }
    case SignatureKind::text:
      break;
  }
  std::string short_url;
  if (!long_url.empty()) {
    short_url = options_.short_url_base + links_.shorten(long_url).code;
  }
  return GeoSignature{shared, std::move(cell), std::move(long_url),
                      std::move(short_url), kind};
}

std::optional<std::string> Signer::expand(const std::string& short_url) const {
  if (!short_url.starts_with(options_.short_url_base)) return std::nullopt;
  return links_.resolve(short_url.substr(options_.short_url_base.size()));
}

}  // namespace geomsg::sig
