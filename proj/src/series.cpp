#include "visnow/series.hpp"

#include "visnow/csv.hpp"
#include "visnow/errors.hpp"

#include <charconv>
#include <map>
#include <sstream>

namespace visnow {

using namespace std::chrono;

const HourRow* HourlySeries::at(Hour h) const {
    if (rows.empty() || h < first_hour() || h > last_hour()) return nullptr;
    return &rows[std::size_t((h - first_hour()).count())];
}

HourlySeries downsample_hourly(std::span<const Observation> reports) {
    HourlySeries out;
    for (const auto& r : reports) {
        if (out.station.empty()) out.station = r.station;
        else if (r.station != out.station)
            throw MixedStations("found " + r.station + " in a series for " + out.station);
    }

    // hour -> index of the best report so far
    std::map<Hour, std::size_t> best;
    auto consider = [&](Hour h, std::size_t idx) {
        auto [it, inserted] = best.try_emplace(h, idx);
        if (inserted) return;
        const auto& cur = reports[it->second];
        const auto& cand = reports[idx];
        auto dc = abs(cur.time - Utc{h});
        auto dn = abs(cand.time - Utc{h});
        if (dn < dc || (dn == dc && cand.time < cur.time)) it->second = idx;
    };
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        if (!r.temp_c) continue;
        Hour down = floor<hours>(r.time);
        auto offset = r.time - Utc{down};
        if (offset <= minutes{30}) consider(down, i);
        if (offset >= minutes{30}) consider(down + hours{1}, i);
    }
    if (best.empty()) return out;

    Hour first = best.begin()->first, last = best.rbegin()->first;
    out.rows.resize(std::size_t((last - first).count()) + 1);
    for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].hour = first + hours{i};
    for (const auto& [h, idx] : best) {
        const auto& r = reports[idx];
        auto& row = out.rows[std::size_t((h - first).count())];
        row.report_time = r.time;
        row.values = {r.temp_c, r.dewpoint_c, r.wind_dir_deg, r.wind_speed_kt, r.visibility_sm, r.pressure_hpa};
        for (std::size_t f = 0; f < kFieldCount; ++f)
            row.flags[f] = row.values[f] ? FillState::observed : FillState::missing;
        row.wx_codes = r.wx_codes;
    }
    return out;
}

HourlySeries forward_fill(const HourlySeries& series, const FillPolicy& policy) {
    HourlySeries out = series;
    if (policy.max_gap_h <= 0) return out;
    for (Field field : policy.fields) {
        auto f = std::size_t(field);
        std::optional<double> last_value;
        std::optional<Hour> last_hour;
        for (auto& row : out.rows) {
            if (row.flags[f] == FillState::observed) {
                last_value = row.values[f];
                last_hour = row.hour;
            } else if (row.flags[f] == FillState::missing && last_hour &&
                       (row.hour - *last_hour).count() <= policy.max_gap_h) {
                row.values[f] = last_value;
                row.flags[f] = FillState::filled;
                row.fill_origin[f] = last_hour;
            }
        }
    }
    return out;
}

std::string_view field_name(Field f) {
    switch (f) {
    case Field::temp: return "temp";
    case Field::dewpoint: return "dewpoint";
    case Field::wind_dir: return "wind_dir";
    case Field::wind_speed: return "wind_speed";
    case Field::visibility: return "visibility";
    case Field::pressure: return "pressure";
    }
    return "?";
}

std::vector<Field> parse_field_list(std::string_view text) {
    std::vector<Field> out;
    for (const auto& name : csv::split(text)) {
        if (name.empty()) continue;
        bool found = false;
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            if (field_name(Field(f)) == name) {
                out.push_back(Field(f));
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("unknown field '" + name + "'");
    }
    return out;
}

namespace {

std::string number(const std::optional<double>& v) {
    if (!v) return {};
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, *v);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError("bad number '" + s + "' in series CSV");
    return v;
}

} // namespace

void write_series_csv(std::ostream& out, const HourlySeries& series) {
    csv::write_row(out, {"station", "valid_utc", "temp_c", "dewpoint_c", "wind_dir_deg", "wind_speed_kt",
                         "visibility_sm", "pressure_hpa", "wx_codes", "fill_flags"});
    for (const auto& row : series.rows) {
        std::string wx, flags;
        for (const auto& c : row.wx_codes) wx += (wx.empty() ? "" : ";") + c;
        for (auto f : row.flags) flags.push_back(char(f));
        csv::Row r{series.station, format_hour(row.hour)};
        for (const auto& v : row.values) r.push_back(number(v));
        r.push_back(wx);
        r.push_back(flags);
        csv::write_row(out, r);
    }
}

HourlySeries read_series_csv(std::istream& in) {
    csv::Reader reader(in);
    const char* names[] = {"station", "valid_utc", "temp_c", "dewpoint_c", "wind_dir_deg", "wind_speed_kt",
                           "visibility_sm", "pressure_hpa", "wx_codes", "fill_flags"};
    std::size_t idx[10];
    for (int k = 0; k < 10; ++k) {
        auto c = reader.column(names[k]);
        if (!c) throw DataError(std::string("series CSV lacks column ") + names[k]);
        idx[k] = *c;
    }
    HourlySeries out;
    csv::Row row;
    while (reader.next(row)) {
        if (row.size() < reader.header().size())
            throw DataError("short row at line " + std::to_string(reader.line_number()));
        if (out.station.empty()) out.station = row[idx[0]];
        else if (row[idx[0]] != out.station) throw MixedStations("series CSV mixes stations");
        auto t = parse_utc(row[idx[1]]);
        if (!t) throw DataError("bad timestamp '" + row[idx[1]] + "'");
        HourRow hr;
        hr.hour = floor<hours>(*t);
        if (!out.rows.empty() && hr.hour != out.rows.back().hour + hours{1})
            throw DataError("series CSV is not a contiguous hourly grid at " + row[idx[1]]);
        for (std::size_t f = 0; f < kFieldCount; ++f) hr.values[f] = parse_number(row[idx[2 + f]]);
        const auto& flags = row[idx[9]];
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            char c = f < flags.size() ? flags[f] : (hr.values[f] ? 'o' : '-');
            hr.flags[f] = c == 'f' ? FillState::filled : c == 'o' ? FillState::observed : FillState::missing;
            if (bool(hr.values[f]) != (hr.flags[f] != FillState::missing))
                throw DataError("fill flag disagrees with value at " + row[idx[1]]);
        }
        if (hr.observed(Field::temp)) hr.report_time = Utc{hr.hour};
        for (const auto& c : csv::split(row[idx[8]].empty() ? std::string{} : row[idx[8]])) {
            std::stringstream ss(c);
            std::string code;
            while (std::getline(ss, code, ';'))
                if (!code.empty()) hr.wx_codes.push_back(code);
        }
        out.rows.push_back(std::move(hr));
    }
    // Restore fill origins.
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        std::optional<Hour> last;
        for (auto& r : out.rows) {
            if (r.flags[f] == FillState::observed) last = r.hour;
            else if (r.flags[f] == FillState::filled) r.fill_origin[f] = last;
        }
    }
    return out;
}

} // namespace visnow
