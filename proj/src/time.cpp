#include "visnow/time.hpp"

#include <charconv>
#include <cstdio>

namespace visnow {

using namespace std::chrono;

Utc make_utc(int year_, unsigned month_, unsigned day_, int hour, int minute) {
    sys_days d = year{year_} / month{month_} / day{day_};
    return Utc{d} + hours{hour} + minutes{minute};
}

std::string format_date(sys_days d) {
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

std::string format_utc(Utc t) {
    auto d = floor<days>(t);
    hh_mm_ss hms{t - d};
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", int(hms.hours().count()), int(hms.minutes().count()));
    return format_date(d) + "T" + buf + "Z";
}

std::string format_hour(Hour h) { return format_utc(Utc{h}); }

namespace {

bool read_int(std::string_view s, size_t pos, size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (size_t i = pos; i < pos + len; ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return res.ec == std::errc{};
}

} // namespace

std::optional<sys_days> parse_date(std::string_view s) {
    int y, m, d;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
    year_month_day ymd{year{y}, month{unsigned(m)}, day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<Utc> parse_utc(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    auto date = parse_date(s);
    if (!date) return std::nullopt;
    if (s.size() == 10) return Utc{*date};
    if (s[10] != ' ' && s[10] != 'T') return std::nullopt;
    int hh, mm;
    if (!read_int(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !read_int(s, 14, 2, mm))
        return std::nullopt;
    if (hh > 23 || mm > 59) return std::nullopt;
    std::string_view rest = s.substr(16);
    if (rest.size() >= 3 && rest[0] == ':') rest.remove_prefix(3);
    if (!rest.empty() && rest != "Z" && rest != "+00:00") return std::nullopt;
    return Utc{*date} + hours{hh} + minutes{mm};
}

Hour nearest_hour(Utc t) {
    auto down = floor<hours>(t);
    return (t - down) > minutes{30} ? down + hours{1} : down;
}

std::optional<Utc> resolve_day_time(unsigned day_, int hour, int minute, Utc reference,
                                    minutes slack) {
    if (day_ < 1 || day_ > 31 || hour < 0 || hour > 24 || minute < 0 || minute > 59) return std::nullopt;
    if (hour == 24 && minute != 0) return std::nullopt;
    year_month_day ref{floor<days>(reference)};
    year_month ym{ref.year(), ref.month()};
    ym += months{1};
    for (int back = 0; back < 4; ++back, ym -= months{1}) {
        year_month_day cand{ym.year(), ym.month(), day{day_}};
        if (!cand.ok()) continue;
        Utc t = Utc{sys_days{cand}} + hours{hour} + minutes{minute};
        if (t <= reference + slack) return t;
    }
    return std::nullopt;
}

} // namespace visnow
