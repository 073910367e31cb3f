#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "geomsg/geo/point.hpp"

namespace geomsg::sig {

struct GeoSignature;

inline constexpr std::size_t kSmsLimit = 140;

enum class Channel { sms, email };
const char* to_string(Channel channel);
Channel parse_channel(std::string_view name);

// RFC 3986: unreserved characters pass through, every other byte becomes
// an uppercase %XX escape.
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

// Counts Unicode code points in UTF-8 text.
std::size_t utf8_length(std::string_view text);

// `sms:?body=` or `mailto:?body=` followed by the encoded body text and the
// signature's short URL (or coordinate text). SMS bodies longer than
// `sms_limit` characters throw LengthError; nothing is truncated.
std::string compose_message(Channel channel, const std::string& body_text,
                            const GeoSignature& sig,
                            std::size_t sms_limit = kSmsLimit);

// The decoded body compose_message would produce.
std::string message_body(const std::string& body_text, const GeoSignature& sig);

std::string format_xgeo(const geo::GeoPoint& p);
geo::GeoPoint parse_xgeo(std::string_view header);

}  // namespace geomsg::sig
