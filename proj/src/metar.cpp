#include "visnow/metar.hpp"

#include "visnow/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace visnow {

namespace {

constexpr double kKtPerMps = 1.943844;
constexpr double kKtPerKmh = 0.539957;

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool all_upper_alnum(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); });
}

int to_int(std::string_view s) {
    int v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

std::vector<std::string_view> tokenize(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) {
            std::string_view tok = s.substr(i, j - i);
            while (!tok.empty() && tok.back() == '=') tok.remove_suffix(1);
            if (!tok.empty()) out.push_back(tok);
        }
        i = j;
    }
    return out;
}

bool is_station(std::string_view t) {
    return t.size() == 4 && t[0] >= 'A' && t[0] <= 'Z' && all_upper_alnum(t);
}

bool is_day_time(std::string_view t) { return t.size() == 7 && t[6] == 'Z' && all_digits(t.substr(0, 6)); }

// "a/b" with positive denominator.
std::optional<double> parse_fraction(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den) || num.size() > 2 || den.size() > 2) return std::nullopt;
    int d = to_int(den);
    if (d == 0) return std::nullopt;
    return double(to_int(num)) / d;
}

struct Wind {
    std::optional<double> dir;
    std::optional<double> speed;
    std::optional<double> gust;
    bool variable = false;
};

std::optional<Wind> parse_wind(std::string_view t) {
    std::string_view unit;
    double factor = 1.0;
    if (t.ends_with("KT")) unit = "KT";
    else if (t.ends_with("MPS")) unit = "MPS", factor = kKtPerMps;
    else if (t.ends_with("KMH")) unit = "KMH", factor = kKtPerKmh;
    else return std::nullopt;
    std::string_view body = t.substr(0, t.size() - unit.size());
    if (body.size() < 5) return std::nullopt;
    std::string_view dir = body.substr(0, 3);
    body.remove_prefix(3);
    std::string_view gust;
    if (auto g = body.find('G'); g != std::string_view::npos) {
        gust = body.substr(g + 1);
        body = body.substr(0, g);
        if (!all_digits(gust) || gust.size() < 2 || gust.size() > 3) return std::nullopt;
    }
    bool speed_missing = body == "//";
    if (!speed_missing && (!all_digits(body) || body.size() < 2 || body.size() > 3)) return std::nullopt;
    Wind w;
    if (dir == "VRB") {
        w.variable = true;
    } else if (dir == "///") {
    } else if (all_digits(dir)) {
        int d = to_int(dir);
        if (d > 360) return std::nullopt;
        w.dir = d == 360 ? 0.0 : double(d);
    } else {
        return std::nullopt;
    }
    if (!speed_missing) w.speed = to_int(body) * factor;
    if (!gust.empty()) w.gust = to_int(gust) * factor;
    if (w.speed && *w.speed == 0.0) w.dir.reset(); // calm: no fake northerly
    return w;
}

bool is_variable_sector(std::string_view t) {
    return t.size() == 7 && t[3] == 'V' && all_digits(t.substr(0, 3)) && all_digits(t.substr(4));
}

constexpr std::array<std::string_view, 8> kDescriptors{"MI", "PR", "BC", "DR", "BL", "SH", "TS", "FZ"};
constexpr std::array<std::string_view, 22> kPhenomena{"DZ", "RA", "SN", "SG", "IC", "PL", "GR", "GS",
                                                      "UP", "BR", "FG", "FU", "VA", "DU", "SA", "HZ",
                                                      "PY", "PO", "SQ", "FC", "SS", "DS"};

bool in(std::string_view code, auto const& table) {
    return std::find(table.begin(), table.end(), code) != table.end();
}

bool is_weather(std::string_view t) {
    if (t.starts_with('-') || t.starts_with('+')) t.remove_prefix(1);
    else if (t.starts_with("VC")) t.remove_prefix(2);
    if (t.empty() || t.size() % 2) return false;
    size_t i = 0;
    bool any = false;
    while (i < t.size() && in(t.substr(i, 2), kDescriptors)) i += 2, any = true;
    bool phen = false;
    while (i < t.size() && in(t.substr(i, 2), kPhenomena)) i += 2, phen = true;
    // "TS" and "SH" may stand alone (thunderstorm without precipitation).
    return i == t.size() && (phen || any);
}

bool is_sky(std::string_view t) {
    if (t == "SKC" || t == "CLR" || t == "NSC" || t == "NCD") return true;
    std::string_view rest;
    if (t.starts_with("VV")) rest = t.substr(2);
    else if (t.starts_with("FEW") || t.starts_with("SCT") || t.starts_with("BKN") || t.starts_with("OVC"))
        rest = t.substr(3);
    else
        return false;
    if (rest.size() < 3) return false;
    auto height = rest.substr(0, 3);
    if (!all_digits(height) && height != "///") return false;
    auto type = rest.substr(3);
    return type.empty() || type == "CB" || type == "TCU" || type == "///";
}

std::optional<double> parse_temp_value(std::string_view s) {
    bool neg = false;
    if (s.starts_with('M')) neg = true, s.remove_prefix(1);
    if (s.size() != 2 || !all_digits(s)) return std::nullopt;
    double v = to_int(s);
    return neg ? (v == 0.0 ? 0.0 : -v) : v;
}

bool parse_temperature(std::string_view t, Observation& obs) {
    auto slash = t.find('/');
    if (slash == std::string_view::npos || t.find('/', slash + 1) != std::string_view::npos) return false;
    auto ts = t.substr(0, slash), ds = t.substr(slash + 1);
    if (ts.empty() || ts.size() > 3) return false;
    auto temp = parse_temp_value(ts);
    if (!temp) return false;
    std::optional<double> dew;
    if (!ds.empty() && ds != "//" && ds != "XX") {
        dew = parse_temp_value(ds);
        if (!dew) return false;
    }
    obs.temp_c = temp;
    obs.dewpoint_c = dew;
    return true;
}

bool is_rvr(std::string_view t) {
    return t.size() > 4 && t[0] == 'R' && t[1] >= '0' && t[1] <= '9' && t.find('/') != std::string_view::npos;
}

bool is_fraction_sm(std::string_view t) {
    return t.ends_with("SM") && t.find('/') != std::string_view::npos;
}

} // namespace

double normalize_visibility(std::string_view token, VisibilityConvention convention) {
    auto fail = [&] { return UnparseableVisibility(std::string(token)); };
    if (token == "CAVOK") return kUnlimitedVisibilitySm;
    if (token.ends_with("SM")) {
        std::string_view body = token.substr(0, token.size() - 2);
        bool plus = false;
        if (body.starts_with('P')) plus = true, body.remove_prefix(1);
        else if (body.starts_with('M')) body.remove_prefix(1); // floor at the reportable value
        double value;
        if (auto sp = body.find(' '); sp != std::string_view::npos) {
            auto whole = body.substr(0, sp);
            auto frac = parse_fraction(body.substr(sp + 1));
            if (!all_digits(whole) || whole.size() > 2 || !frac) throw fail();
            value = to_int(whole) + *frac;
        } else if (body.find('/') != std::string_view::npos) {
            auto frac = parse_fraction(body);
            if (!frac) throw fail();
            value = *frac;
        } else if (all_digits(body) && body.size() <= 2) {
            value = to_int(body);
        } else {
            throw fail();
        }
        if (plus && value >= 6.0 && value < 10.0) return kUnlimitedVisibilitySm;
        return value;
    }
    std::string_view body = token;
    if (body.ends_with("NDV")) body.remove_suffix(3);
    if (convention == VisibilityConvention::meters && body.size() == 4 && all_digits(body)) {
        int meters = to_int(body);
        if (meters >= 9999) return kUnlimitedVisibilitySm;
        return meters / kMetersPerStatuteMile;
    }
    if (convention == VisibilityConvention::statute && all_digits(body) && body.size() <= 2)
        return to_int(body);
    throw fail();
}

Observation parse_metar(std::string_view raw, Utc reference) {
    Observation obs;
    obs.raw = std::string(raw);
    auto toks = tokenize(raw);
    size_t i = 0;
    while (i < toks.size() && (toks[i] == "METAR" || toks[i] == "SPECI" || toks[i] == "COR")) ++i;
    if (i >= toks.size() || !is_station(toks[i]))
        throw MalformedReport("no station identifier in '" + std::string(raw) + "'");
    obs.station = std::string(toks[i++]);
    if (i >= toks.size() || !is_day_time(toks[i]))
        throw MalformedReport("no DDHHMMZ time group in '" + std::string(raw) + "'");
    {
        auto t = toks[i++];
        auto resolved = resolve_day_time(unsigned(to_int(t.substr(0, 2))), to_int(t.substr(2, 2)),
                                         to_int(t.substr(4, 2)), reference);
        if (!resolved || to_int(t.substr(2, 2)) > 23)
            throw MalformedReport("impossible time group '" + std::string(t) + "'");
        obs.time = *resolved;
    }

    bool have_wind = false, have_vis = false, have_temp = false, have_pressure = false;
    for (; i < toks.size(); ++i) {
        std::string_view t = toks[i];
        if (t == "RMK" || t == "TEMPO" || t == "BECMG" || t == "NOSIG") {
            obs.diagnostics.push_back("stopped at " + std::string(t));
            break;
        }
        if (t == "NIL") {
            obs.diagnostics.push_back("NIL report");
            break;
        }
        if (t == "AUTO" || t == "COR") continue;

        if (!have_wind) {
            if (auto w = parse_wind(t)) {
                have_wind = true;
                obs.wind_dir_deg = w->dir;
                obs.wind_speed_kt = w->speed;
                obs.wind_gust_kt = w->gust;
                obs.wind_token = std::string(t);
                if (w->variable) obs.diagnostics.push_back("variable wind");
                continue;
            }
        }
        if (is_variable_sector(t)) {
            obs.diagnostics.push_back("wind sector " + std::string(t));
            continue;
        }
        if (t == "CAVOK") {
            if (!have_vis) obs.visibility_sm = kUnlimitedVisibilitySm;
            have_vis = true;
            continue;
        }
        // whole number followed by a fraction: "1 1/2SM"
        if (!have_vis && all_digits(t) && t.size() <= 2 && i + 1 < toks.size() && is_fraction_sm(toks[i + 1])) {
            std::string joined = std::string(t) + " " + std::string(toks[i + 1]);
            try {
                obs.visibility_sm = normalize_visibility(joined, VisibilityConvention::statute);
                have_vis = true;
                ++i;
                continue;
            } catch (const UnparseableVisibility&) {
            }
        }
        if (t.ends_with("SM") && !t.starts_with("R")) {
            try {
                double v = normalize_visibility(t, VisibilityConvention::statute);
                if (!have_vis) obs.visibility_sm = v;
                else obs.diagnostics.push_back("extra visibility " + std::string(t));
                have_vis = true;
            } catch (const UnparseableVisibility&) {
                obs.diagnostics.push_back("unparseable visibility " + std::string(t));
            }
            continue;
        }
        if (t.size() >= 4 && all_digits(t.substr(0, 4)) &&
            (t.size() == 4 || t.substr(4) == "NDV" || all_upper_alnum(t.substr(4))) && t.size() <= 7) {
            auto suffix = t.substr(4);
            bool directional = !suffix.empty() && suffix != "NDV";
            if (!have_vis && !directional) {
                obs.visibility_sm = normalize_visibility(t, VisibilityConvention::meters);
                have_vis = true;
            } else {
                obs.diagnostics.push_back("secondary visibility " + std::string(t));
            }
            continue;
        }
        if (t == "////" || t == "////SM") {
            have_vis = true;
            obs.diagnostics.push_back("visibility not reported");
            continue;
        }
        if (is_rvr(t)) {
            obs.diagnostics.push_back("rvr " + std::string(t));
            continue;
        }
        if (is_weather(t)) {
            obs.wx_codes.emplace_back(t);
            continue;
        }
        if (t.starts_with("RE") && is_weather(t.substr(2))) {
            obs.diagnostics.push_back("recent weather " + std::string(t));
            continue;
        }
        if (is_sky(t)) {
            obs.diagnostics.push_back("sky " + std::string(t));
            continue;
        }
        if (!have_temp && parse_temperature(t, obs)) {
            have_temp = true;
            continue;
        }
        if (!have_pressure && t.size() == 5 && (t[0] == 'A' || t[0] == 'Q')) {
            if (all_digits(t.substr(1))) {
                double p = t[0] == 'A' ? to_int(t.substr(1)) / 100.0 * kHpaPerInHg : double(to_int(t.substr(1)));
                if (p >= kMinPlausiblePressureHpa && p <= kMaxPlausiblePressureHpa) {
                    obs.pressure_hpa = p;
                } else {
                    obs.diagnostics.push_back("implausible pressure " + std::string(t));
                }
                have_pressure = true;
                continue;
            }
            if (t.substr(1) == "////") {
                have_pressure = true;
                obs.diagnostics.push_back("pressure not reported");
                continue;
            }
        }
        if (t.starts_with("WS")) {
            obs.diagnostics.push_back("wind shear " + std::string(t));
            continue;
        }
        obs.diagnostics.push_back("unknown group " + std::string(t));
    }
    return obs;
}

Observation parse_metar(std::string_view raw) {
    auto now = std::chrono::floor<std::chrono::minutes>(std::chrono::system_clock::now());
    return parse_metar(raw, now);
}

std::string encode_wind(const Observation& obs) {
    if (!obs.wind_speed_kt) return {};
    char buf[32];
    int speed = int(std::lround(*obs.wind_speed_kt));
    std::string dir;
    if (obs.wind_dir_deg) {
        int d = int(std::lround(*obs.wind_dir_deg));
        std::snprintf(buf, sizeof buf, "%03d", d == 0 ? 360 : d);
        dir = buf;
    } else if (speed == 0) {
        dir = "000";
    } else {
        dir = "VRB";
    }
    std::snprintf(buf, sizeof buf, "%s%02d", dir.c_str(), speed);
    std::string out = buf;
    if (obs.wind_gust_kt) {
        std::snprintf(buf, sizeof buf, "G%02d", int(std::lround(*obs.wind_gust_kt)));
        out += buf;
    }
    return out + "KT";
}

} // namespace visnow
