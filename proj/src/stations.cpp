#include "visnow/stations.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace visnow {

namespace {

// Aerodrome reference points, degrees (north and east positive).
constexpr std::array<StationInfo, 30> kStations{{
    {"CYYZ", "Toronto Pearson", {43.6772, -79.6306}},
    {"EDDF", "Frankfurt", {50.0333, 8.5706}},
    {"EGLL", "London Heathrow", {51.4700, -0.4543}},
    {"EHAM", "Amsterdam Schiphol", {52.3086, 4.7639}},
    {"KATL", "Atlanta Hartsfield-Jackson", {33.6367, -84.4281}},
    {"KBOS", "Boston Logan", {42.3656, -71.0096}},
    {"KDEN", "Denver", {39.8617, -104.6731}},
    {"KDFW", "Dallas/Fort Worth", {32.8968, -97.0380}},
    {"KEWR", "Newark Liberty", {40.6925, -74.1687}},
    {"KJFK", "New York JFK", {40.6398, -73.7789}},
    {"KLAX", "Los Angeles", {33.9425, -118.4081}},
    {"KLGA", "New York LaGuardia", {40.7772, -73.8726}},
    {"KORD", "Chicago O'Hare", {41.9786, -87.9048}},
    {"KSEA", "Seattle-Tacoma", {47.4490, -122.3093}},
    {"KSFO", "San Francisco", {37.6190, -122.3749}},
    {"LEMD", "Madrid Barajas", {40.4719, -3.5626}},
    {"LFPG", "Paris Charles de Gaulle", {49.0128, 2.5500}},
    {"LIMC", "Milan Malpensa", {45.6306, 8.7231}},
    {"OMDB", "Dubai", {25.2528, 55.3644}},
    {"RJTT", "Tokyo Haneda", {35.5523, 139.7797}},
    {"SABE", "Buenos Aires Aeroparque", {-34.5592, -58.4156}},
    {"SAEZ", "Buenos Aires Ezeiza", {-34.8222, -58.5358}},
    {"SBGR", "Sao Paulo Guarulhos", {-23.4356, -46.4731}},
    {"SCEL", "Santiago Arturo Merino Benitez", {-33.3930, -70.7858}},
    {"SCFA", "Antofagasta", {-23.4445, -70.4451}},
    {"SKBO", "Bogota El Dorado", {4.7016, -74.1469}},
    {"SPJC", "Lima Jorge Chavez", {-12.0219, -77.1143}},
    {"VHHH", "Hong Kong", {22.3089, 113.9146}},
    {"VIDP", "Delhi Indira Gandhi", {28.5665, 77.1031}},
    {"YSSY", "Sydney", {-33.9461, 151.1772}},
}};

} // namespace

std::span<const StationInfo> known_stations() { return kStations; }

std::optional<StationInfo> lookup_station(std::string_view icao) {
    std::string key(icao);
    for (char& c : key) c = char(std::toupper(static_cast<unsigned char>(c)));
    auto it = std::lower_bound(kStations.begin(), kStations.end(), key,
                               [](const StationInfo& s, const std::string& k) { return s.icao < k; });
    if (it == kStations.end() || it->icao != key) return std::nullopt;
    return *it;
}

} // namespace visnow
