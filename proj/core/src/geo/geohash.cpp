#include "geomsg/geo/geohash.hpp"

#include <array>
#include <cstdint>

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::geo {
namespace {

constexpr std::array<std::int8_t, 128> make_decode_table() {
  std::array<std::int8_t, 128> table{};
  for (auto& v : table) v = -1;
  for (std::size_t i = 0; i < kGeohashAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kGeohashAlphabet[i])] =
        static_cast<std::int8_t>(i);
  }
  return table;
}

constexpr auto kDecodeTable = make_decode_table();

struct Interval {
  double lo;
  double hi;

  // Halves the interval around `value`; returns the bit chosen.
  bool narrow_to(double value) {
    const double mid = (lo + hi) / 2.0;
    if (value >= mid) {
      lo = mid;
      return true;
    }
    hi = mid;
    return false;
  }

  void narrow(bool upper) {
    const double mid = (lo + hi) / 2.0;
    (upper ? lo : hi) = mid;
  }
};

}  // namespace

GeoPoint GeohashCell::center() const {
  return GeoPoint((bbox_.lat_min + bbox_.lat_max) / 2.0,
                  (bbox_.lon_min + bbox_.lon_max) / 2.0);
}

GeohashCell geohash_encode(const GeoPoint& p, std::size_t length) {
  if (length < 1 || length > kMaxGeohashLength) {
    throw Error(Errc::validation,
                fmt::format("geohash length {} outside 1..{}", length,
                            kMaxGeohashLength));
  }
  Interval lat{-90.0, 90.0};
  Interval lon{-180.0, 180.0};
  std::string code;
  code.reserve(length);
  bool even = true;
  for (std::size_t c = 0; c < length; ++c) {
    unsigned index = 0;
    for (int b = 0; b < 5; ++b) {
      const bool bit = even ? lon.narrow_to(p.lon()) : lat.narrow_to(p.lat());
      index = (index << 1) | (bit ? 1u : 0u);
      even = !even;
    }
    code.push_back(kGeohashAlphabet[index]);
  }
  // Decoding recomputes the exact same intervals; reusing it keeps a single
  // definition of the box.
  return geohash_decode(code);
}

GeohashCell geohash_decode(std::string_view code) {
  if (code.empty()) {
    throw Error(Errc::parse, "empty geohash");
  }
  if (code.size() > kMaxGeohashLength) {
    throw Error(Errc::parse, fmt::format("geohash longer than {} characters",
                                         kMaxGeohashLength));
  }
  Interval lat{-90.0, 90.0};
  Interval lon{-180.0, 180.0};
  bool even = true;
  for (std::size_t i = 0; i < code.size(); ++i) {
    const auto ch = static_cast<unsigned char>(code[i]);
    const int value = ch < kDecodeTable.size() ? kDecodeTable[ch] : -1;
    if (value < 0) {
      throw Error(Errc::parse,
                  fmt::format("illegal geohash character '{}' at position {}",
                              code[i], i));
    }
    for (int b = 4; b >= 0; --b) {
      const bool bit = ((value >> b) & 1) != 0;
      (even ? lon : lat).narrow(bit);
      even = !even;
    }
  }
  return GeohashCell(std::string(code),
                     BoundingBox{lat.lo, lat.hi, lon.lo, lon.hi});
}

std::size_t common_prefix_length(std::string_view a, std::string_view b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

bool same_region(std::string_view a, std::string_view b, std::size_t chars) {
  return chars > 0 && common_prefix_length(a, b) >= chars;
}

std::size_t prefix_length(PrecisionLevel level) {
  switch (level) {
    case PrecisionLevel::exact: return 11;
    case PrecisionLevel::street: return 7;
    case PrecisionLevel::city: return 5;
    case PrecisionLevel::area: return 4;
  }
  return 11;
}

const char* to_string(PrecisionLevel level) {
  switch (level) {
    case PrecisionLevel::exact: return "exact";
    case PrecisionLevel::street: return "street";
    case PrecisionLevel::city: return "city";
    case PrecisionLevel::area: return "area";
  }
  return "exact";
}

PrecisionLevel parse_precision_level(std::string_view name) {
  for (auto level : {PrecisionLevel::exact, PrecisionLevel::street,
                     PrecisionLevel::city, PrecisionLevel::area}) {
    if (name == to_string(level)) return level;
  }
  throw Error(Errc::validation,
              fmt::format("unknown precision level '{}'", name));
}

GeohashCell obfuscate(const GeohashCell& cell, PrecisionLevel level) {
  const std::size_t want = prefix_length(level);
  if (cell.length() < want) {
    throw Error(Errc::precision,
                fmt::format("cannot refine '{}' ({} chars) to {} level ({} chars)",
                            cell.code(), cell.length(), to_string(level), want));
  }
  return geohash_decode(std::string_view(cell.code()).substr(0, want));
}

}  // namespace geomsg::geo
