#pragma once

#include <optional>
#include <string>

#include "geomsg/geo/point.hpp"

namespace geomsg::sig {

inline constexpr const char* kDefaultMapUrlTemplate =
    "https://maps.googleapis.com/maps/api/staticmap?center={center}&zoom={zoom}"
    "&size=480x320&{markers}";

// Static-map URL renderer. `{markers}` expands to one `markers=<lat>,<lon>`
// parameter per point, joined by '&'; `{center}` and `{zoom}` are optional.
class MapUrlBuilder {
 public:
  // Throws Errc::config when the template lacks `{markers}`.
  explicit MapUrlBuilder(std::string url_template = kDefaultMapUrlTemplate,
                         int zoom = 15);

  std::string build(const geo::GeoPoint& sender,
                    const std::optional<geo::GeoPoint>& viewer = std::nullopt) const;

  const std::string& url_template() const { return template_; }
  int zoom() const { return zoom_; }

 private:
  std::string template_;
  int zoom_;
};

// Replaces every `{name}` occurrence in `text`.
std::string replace_all(std::string text, const std::string& placeholder,
                        const std::string& value);

}  // namespace geomsg::sig
