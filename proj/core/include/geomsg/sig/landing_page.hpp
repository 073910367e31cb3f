#pragma once

#include <string>
#include <string_view>

#include "geomsg/geo/point.hpp"
#include "geomsg/sig/map_url.hpp"

namespace geomsg::sig {

std::string html_escape(std::string_view text);

// Self-contained mini-portal for one point: map image, note, coordinates and
// an advertising slot. Output depends only on the arguments.
std::string render_landing_page(const geo::GeoPoint& p, const std::string& note,
                                const MapUrlBuilder& maps = MapUrlBuilder());

}  // namespace geomsg::sig
