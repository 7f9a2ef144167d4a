#pragma once

#include "visnow/metar.hpp"
#include "visnow/time.hpp"

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace visnow {

enum class Field : std::size_t { temp, dewpoint, wind_dir, wind_speed, visibility, pressure };
inline constexpr std::size_t kFieldCount = 6;

enum class FillState : char { observed = 'o', filled = 'f', missing = '-' };

/// One grid hour. Values are nullopt when missing.
struct HourRow {
    Hour hour{};
    /// Time of the selected report, if any report qualified for this hour.
    std::optional<Utc> report_time;
    std::array<std::optional<double>, kFieldCount> values{};
    std::array<FillState, kFieldCount> flags{FillState::missing, FillState::missing, FillState::missing,
                                             FillState::missing, FillState::missing, FillState::missing};
    /// Grid hour the value was carried from; set only for filled values.
    std::array<std::optional<Hour>, kFieldCount> fill_origin{};
    std::vector<std::string> wx_codes;

    const std::optional<double>& get(Field f) const { return values[std::size_t(f)]; }
    FillState flag(Field f) const { return flags[std::size_t(f)]; }
    bool observed(Field f) const { return flag(f) == FillState::observed; }
};

/// Hourly, quality-controlled timeline for one station. rows[i].hour ==
/// start + i hours; missing hours stay in the grid.
struct HourlySeries {
    std::string station;
    std::vector<HourRow> rows;

    bool empty() const { return rows.empty(); }
    Hour first_hour() const { return rows.front().hour; }
    Hour last_hour() const { return rows.back().hour; }
    /// Row for grid hour `h`, or nullptr outside the grid.
    const HourRow* at(Hour h) const;
};

/// Reduce a report stream to hourly samples: per grid hour, the report with a
/// temperature that lies nearest the top of the hour within +-30 min
/// (earlier report wins ties). Throws MixedStations.
HourlySeries downsample_hourly(std::span<const Observation> reports);

struct FillPolicy {
    int max_gap_h = 3;
    std::vector<Field> fields{Field::pressure, Field::visibility};
};

/// Carry the policy's fields forward from their last observed value across
/// at most `max_gap_h` hours. Filled values never seed further filling.
HourlySeries forward_fill(const HourlySeries& series, const FillPolicy& policy = {});

/// CSV: station, valid_utc, temp_c, dewpoint_c, wind_dir_deg, wind_speed_kt,
/// visibility_sm, pressure_hpa, wx_codes, fill_flags
void write_series_csv(std::ostream& out, const HourlySeries& series);
HourlySeries read_series_csv(std::istream& in);

/// Parses a comma list of field names ("pressure,visibility").
std::vector<Field> parse_field_list(std::string_view text);
std::string_view field_name(Field f);

} // namespace visnow
