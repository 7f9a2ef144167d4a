#pragma once

#include "visnow/features.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace visnow {

struct StationInfo {
    std::string_view icao;
    std::string_view name;
    StationLocation location;
};

/// Bundled ICAO coordinate table, sorted by identifier.
std::span<const StationInfo> known_stations();

/// Case-insensitive lookup.
std::optional<StationInfo> lookup_station(std::string_view icao);

} // namespace visnow
