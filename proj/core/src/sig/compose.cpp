#include "geomsg/sig/compose.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "geomsg/error.hpp"
#include "geomsg/sig/signature.hpp"

namespace geomsg::sig {

const char* to_string(Channel channel) {
  return channel == Channel::sms ? "sms" : "email";
}

Channel parse_channel(std::string_view name) {
  if (name == "sms") return Channel::sms;
  if (name == "email") return Channel::email;
  throw Error(Errc::validation, fmt::format("unknown channel '{}'", name));
}

namespace {

bool unreserved(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size() * 3);
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && unreserved(c)) {
      out.push_back(ch);
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out.push_back(text[i]);
      continue;
    }
    const int hi = i + 2 < text.size() ? hex_value(text[i + 1]) : -1;
    const int lo = i + 2 < text.size() ? hex_value(text[i + 2]) : -1;
    if (hi < 0 || lo < 0) {
      throw Error(Errc::parse, fmt::format("bad percent escape at offset {}", i));
    }
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char ch : text) {
    if ((static_cast<unsigned char>(ch) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string message_body(const std::string& body_text, const GeoSignature& sig) {
  const std::string attachment = sig.rendered();
  if (body_text.empty()) return attachment;
  return body_text + " " + attachment;
}

std::string compose_message(Channel channel, const std::string& body_text,
                            const GeoSignature& sig, std::size_t sms_limit) {
  if (sig.kind != SignatureKind::text && sig.short_url.empty()) {
    throw Error(Errc::validation, "signature has no short URL");
  }
  const std::string body = message_body(body_text, sig);
  if (channel == Channel::sms) {
    const std::size_t length = utf8_length(body);
    if (length > sms_limit) {
      throw LengthError(fmt::format("sms body is {} characters, {} over the {} limit",
                                    length, length - sms_limit, sms_limit),
                        length, sms_limit);
    }
    return "sms:?body=" + percent_encode(body);
  }
  return "mailto:?body=" + percent_encode(body);
}

std::string format_xgeo(const geo::GeoPoint& p) {
  return "X-GEO: " + geo::format_coords(p);
}

geo::GeoPoint parse_xgeo(std::string_view header) {
  const auto colon = header.find(':');
  if (colon == std::string_view::npos) {
    throw Error(Errc::parse, "X-GEO header has no ':'");
  }
  std::string_view name = header.substr(0, colon);
  while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
  static constexpr std::string_view kName = "x-geo";
  bool name_ok = name.size() == kName.size();
  for (std::size_t i = 0; name_ok && i < name.size(); ++i) {
    name_ok = std::tolower(static_cast<unsigned char>(name[i])) == kName[i];
  }
  if (!name_ok) {
    throw Error(Errc::parse, fmt::format("unexpected header name '{}'", name));
  }

  std::vector<double> values;
  std::string_view rest = header.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    if (rest[pos] == ' ' || rest[pos] == '\t' || rest[pos] == '\r') {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < rest.size() && rest[end] != ' ' && rest[end] != '\t' &&
           rest[end] != '\r') {
      ++end;
    }
    const std::string_view token = rest.substr(pos, end - pos);
    double v = 0.0;
    // from_chars rejects a leading '+'; accept it as an ordinary decimal sign.
    const std::string_view digits =
        token.starts_with('+') ? token.substr(1) : token;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty() ||
        !std::isfinite(v)) {
      throw Error(Errc::parse, fmt::format("bad X-GEO number '{}'", token));
    }
    values.push_back(v);
    pos = end;
  }
  if (values.size() != 2) {
    throw Error(Errc::parse,
                fmt::format("X-GEO needs 2 fields, got {}", values.size()));
  }
  if (!geo::GeoPoint::valid(values[0], values[1])) {
    throw Error(Errc::parse, fmt::format("X-GEO range error: lat {} lon {}",
                                         values[0], values[1]));
  }
  return geo::GeoPoint(values[0], values[1]);
}

}  // namespace geomsg::sig
