#include "geomsg/sig/landing_page.hpp"

namespace geomsg::sig {

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string render_landing_page(const geo::GeoPoint& p, const std::string& note,
                                const MapUrlBuilder& maps) {
  const std::string coords = geo::format_coords(p);
  std::string html;
  html += "<!DOCTYPE html>\n";
  html += "<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  html += "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n";
  html += "<title>Location " + coords + "</title>\n";
  html += "<style>body{font-family:sans-serif;margin:0;padding:8px}"
          "img{max-width:100%}.ad-slot{min-height:50px;border:1px dashed #999}"
          "</style>\n";
  html += "</head>\n<body>\n";
  html += "<img class=\"map\" alt=\"map\" src=\"" + html_escape(maps.build(p)) + "\">\n";
  html += "<p class=\"note\">" + html_escape(note) + "</p>\n";
  html += "<p class=\"coords\">" + coords + "</p>\n";
  html += "<div class=\"ad-slot\" data-slot=\"landing-1\"></div>\n";
  html += "</body>\n</html>\n";
  return html;
}

}  // namespace geomsg::sig
