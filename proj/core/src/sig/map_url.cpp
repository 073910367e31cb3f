#include "geomsg/sig/map_url.hpp"

#include <fmt/format.h>

#include "geomsg/error.hpp"

namespace geomsg::sig {

std::string replace_all(std::string text, const std::string& placeholder,
                        const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(placeholder, pos)) != std::string::npos) {
    text.replace(pos, placeholder.size(), value);
    pos += value.size();
  }
  return text;
}

MapUrlBuilder::MapUrlBuilder(std::string url_template, int zoom)
    : template_(std::move(url_template)), zoom_(zoom) {
  if (template_.find("{markers}") == std::string::npos) {
    throw Error(Errc::config,
                "map_url_template is missing the {markers} placeholder");
  }
  if (zoom_ < 0 || zoom_ > 21) {
    throw Error(Errc::config, fmt::format("map zoom {} outside 0..21", zoom_));
  }
}

std::string MapUrlBuilder::build(const geo::GeoPoint& sender,
                                 const std::optional<geo::GeoPoint>& viewer) const {
  std::string markers = "markers=" + geo::format_coords_csv(sender);
  if (viewer) markers += "&markers=" + geo::format_coords_csv(*viewer);
  std::string url = replace_all(template_, "{center}", geo::format_coords_csv(sender));
  url = replace_all(std::move(url), "{zoom}", std::to_string(zoom_));
  return replace_all(std::move(url), "{markers}", markers);
}

}  // namespace geomsg::sig
