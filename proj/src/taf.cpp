#include "visnow/taf.hpp"

#include "visnow/errors.hpp"
#include "visnow/metar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace visnow {

using namespace std::chrono;

std::string_view to_string(GroupKind kind) {
    switch (kind) {
    case GroupKind::base: return "BASE";
    case GroupKind::fm: return "FM";
    case GroupKind::becmg: return "BECMG";
    case GroupKind::tempo: return "TEMPO";
    case GroupKind::prob: return "PROB";
    }
    return "?";
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
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
            auto tok = s.substr(i, j - i);
            while (!tok.empty() && tok.back() == '=') tok.remove_suffix(1);
            if (!tok.empty()) out.push_back(tok);
        }
        i = j;
    }
    return out;
}

bool is_period(std::string_view t) {
    return t.size() == 9 && t[4] == '/' && all_digits(t.substr(0, 4)) && all_digits(t.substr(5));
}

// Earliest instant with the given day/hour/minute that is not before
// `anchor - 1 day`.
std::optional<Utc> resolve_forward(unsigned day_, int hour, int minute, Utc anchor) {
    if (day_ < 1 || day_ > 31 || hour < 0 || hour > 24 || minute < 0 || minute > 59) return std::nullopt;
    if (hour == 24 && minute != 0) return std::nullopt;
    year_month_day a{floor<days>(anchor)};
    year_month ym{a.year(), a.month()};
    ym -= months{1};
    for (int k = 0; k < 4; ++k, ym += months{1}) {
        year_month_day cand{ym.year(), ym.month(), day{day_}};
        if (!cand.ok()) continue;
        Utc t = Utc{sys_days{cand}} + hours{hour} + minutes{minute};
        if (t >= anchor - days{1}) return t;
    }
    return std::nullopt;
}

TimeWindow resolve_period(std::string_view t, Utc anchor, std::string_view raw) {
    auto start = resolve_forward(unsigned(to_int(t.substr(0, 2))), to_int(t.substr(2, 2)), 0, anchor);
    if (!start) throw UnresolvableGroupTime(std::string(t) + " in '" + std::string(raw) + "'");
    auto end = resolve_forward(unsigned(to_int(t.substr(5, 2))), to_int(t.substr(7, 2)), 0, *start);
    if (!end || *end <= *start) throw UnresolvableGroupTime(std::string(t) + " in '" + std::string(raw) + "'");
    return {*start, *end, false};
}

struct RawGroup {
    GroupKind kind;
    std::optional<Utc> fm_time;
    std::optional<TimeWindow> period;
    std::optional<double> visibility;
    std::optional<int> probability;
    std::string text;
};

std::optional<double> group_visibility(std::span<const std::string_view> toks) {
    for (size_t i = 0; i < toks.size(); ++i) {
        auto t = toks[i];
        if (t == "CAVOK") return kUnlimitedVisibilitySm;
        if (all_digits(t) && t.size() <= 2 && i + 1 < toks.size() && toks[i + 1].ends_with("SM") &&
            toks[i + 1].find('/') != std::string_view::npos) {
            try {
                return normalize_visibility(std::string(t) + " " + std::string(toks[i + 1]),
                                            VisibilityConvention::statute);
            } catch (const UnparseableVisibility&) {
            }
        }
        if (t.ends_with("SM")) {
            try {
                return normalize_visibility(t, VisibilityConvention::statute);
            } catch (const UnparseableVisibility&) {
            }
            continue;
        }
        if (t.size() == 4 && all_digits(t)) return normalize_visibility(t, VisibilityConvention::meters);
    }
    return std::nullopt;
}

bool is_fm(std::string_view t) { return t.size() == 8 && t.starts_with("FM") && all_digits(t.substr(2)); }
bool is_prob(std::string_view t) {
    return t.size() == 6 && t.starts_with("PROB") && all_digits(t.substr(4));
}

} // namespace

TafBulletin parse_taf(std::string_view raw, Utc reference) {
    TafBulletin b;
    b.raw = std::string(raw);
    auto toks = tokenize(raw);
    auto text = [&] { return "'" + std::string(raw) + "'"; };

    size_t i = 0;
    for (; i < toks.size(); ++i) {
        if (toks[i] == "TAF") continue;
        if (toks[i] == "AMD") b.amended = true;
        else if (toks[i] == "COR") b.corrected = true;
        else break;
    }
    if (i >= toks.size() || toks[i].size() != 4 || !std::isupper(static_cast<unsigned char>(toks[i][0])))
        throw MalformedBulletin("no station in " + text());
    b.station = std::string(toks[i++]);
    b.issue_time = reference;
    if (i < toks.size() && toks[i].size() == 7 && toks[i].back() == 'Z' && all_digits(toks[i].substr(0, 6))) {
        auto t = toks[i++];
        auto issue = resolve_day_time(unsigned(to_int(t.substr(0, 2))), to_int(t.substr(2, 2)),
                                      to_int(t.substr(4, 2)), reference);
        if (!issue) throw MalformedBulletin("bad issue time in " + text());
        b.issue_time = *issue;
    }
    if (i >= toks.size() || !is_period(toks[i])) throw MalformedBulletin("no validity window in " + text());
    {
        auto v = toks[i++];
        auto from = resolve_forward(unsigned(to_int(v.substr(0, 2))), to_int(v.substr(2, 2)), 0, b.issue_time);
        if (!from) throw MalformedBulletin("bad validity " + std::string(v));
        auto to = resolve_forward(unsigned(to_int(v.substr(5, 2))), to_int(v.substr(7, 2)), 0, *from);
        if (!to || *to <= *from) throw MalformedBulletin("bad validity " + std::string(v));
        b.valid_from = *from;
        b.valid_to = *to;
    }

    // Split the remaining tokens into groups at change markers.
    std::vector<RawGroup> raws;
    std::vector<std::vector<std::string_view>> bodies;
    raws.push_back({GroupKind::base, {}, {}, {}, {}, {}});
    bodies.emplace_back();
    for (; i < toks.size(); ++i) {
        auto t = toks[i];
        if (t == "RMK") break;
        if (is_fm(t)) {
            auto fm = resolve_forward(unsigned(to_int(t.substr(2, 2))), to_int(t.substr(4, 2)),
                                      to_int(t.substr(6, 2)), b.valid_from);
            if (!fm) throw UnresolvableGroupTime(std::string(t) + " in " + text());
            raws.push_back({GroupKind::fm, fm, {}, {}, {}, std::string(t)});
            bodies.emplace_back();
            continue;
        }
        if (t == "BECMG" || t == "TEMPO" || t == "INTER" || is_prob(t)) {
            RawGroup g{GroupKind::tempo, {}, {}, {}, {}, std::string(t)};
            if (t == "BECMG") g.kind = GroupKind::becmg;
            if (is_prob(t)) {
                g.kind = GroupKind::prob;
                g.probability = to_int(t.substr(4));
                if (i + 1 < toks.size() && (toks[i + 1] == "TEMPO" || toks[i + 1] == "INTER")) {
                    g.text += " " + std::string(toks[++i]);
                }
            }
            if (i + 1 >= toks.size() || !is_period(toks[i + 1]))
                throw UnresolvableGroupTime("change group without period in " + text());
            g.period = resolve_period(toks[++i], b.valid_from, raw);
            g.text += " " + std::string(toks[i]);
            raws.push_back(std::move(g));
            bodies.emplace_back();
            continue;
        }
        bodies.back().push_back(t);
        raws.back().text += (raws.back().text.empty() ? "" : " ") + std::string(t);
    }
    for (size_t k = 0; k < raws.size(); ++k) raws[k].visibility = group_visibility(bodies[k]);

    // Resolve windows.
    auto next_fm_after = [&](size_t k) -> std::pair<Utc, bool> {
        for (size_t j = k + 1; j < raws.size(); ++j)
            if (raws[j].kind == GroupKind::fm) return {*raws[j].fm_time, false};
        return {b.valid_to, true};
    };
    Utc last_fm = b.valid_from;
    std::optional<size_t> prevailing; // index into b.groups
    std::optional<double> prevailing_vis;
    for (size_t k = 0; k < raws.size(); ++k) {
        const auto& r = raws[k];
        ForecastGroup g;
        g.kind = r.kind;
        g.text = r.text;
        g.probability_pct = r.probability;
        switch (r.kind) {
        case GroupKind::base: {
            auto [end, closed] = next_fm_after(k);
            g.window = {b.valid_from, end, closed};
            break;
        }
        case GroupKind::fm: {
            if (*r.fm_time < last_fm || *r.fm_time >= b.valid_to)
                throw UnresolvableGroupTime(r.text + " outside validity in " + text());
            last_fm = *r.fm_time;
            auto [end, closed] = next_fm_after(k);
            g.window = {*r.fm_time, end, closed};
            break;
        }
        case GroupKind::becmg: {
            auto [end, closed] = next_fm_after(k);
            g.transition = r.period;
            g.window = {r.period->start, std::max(end, r.period->end), closed};
            break;
        }
        case GroupKind::tempo:
        case GroupKind::prob: g.window = *r.period; break;
        }
        if (g.window.start < b.valid_from || g.window.end > b.valid_to)
            throw UnresolvableGroupTime(r.text + " outside validity in " + text());

        g.visibility_sm = r.visibility;
        if (!g.visibility_sm && r.kind != GroupKind::base && prevailing_vis) {
            g.visibility_sm = prevailing_vis;
            g.visibility_inherited = true;
        }
        bool is_prevailing = r.kind == GroupKind::base || r.kind == GroupKind::fm || r.kind == GroupKind::becmg;
        if (r.kind == GroupKind::becmg && prevailing) {
            auto& old = b.groups[*prevailing].window;
            if (g.transition->end < old.end) {
                old.end = g.transition->end;
                old.closed_end = false;
            }
        }
        b.groups.push_back(std::move(g));
        if (is_prevailing) {
            prevailing = b.groups.size() - 1;
            prevailing_vis = b.groups.back().visibility_sm;
        }
    }
    return b;
}

std::optional<double> resolve_visibility(const TafBulletin& bulletin, Utc t) {
    if (!bulletin.covers(t)) return std::nullopt;
    std::optional<double> best;
    for (const auto& g : bulletin.groups) {
        if (!g.visibility_sm || !g.window.contains(t)) continue;
        if (!best || *g.visibility_sm < *best) best = g.visibility_sm;
    }
    return best;
}

std::optional<int> taf_predicts_ifr(const TafBulletin& bulletin, Utc t) {
    auto vis = resolve_visibility(bulletin, t);
    if (!vis) return std::nullopt;
    return *vis < 3.0 ? 1 : 0;
}

const TafBulletin* select_bulletin(std::span<const TafBulletin> bulletins, Utc decision_time) {
    auto it = std::upper_bound(bulletins.begin(), bulletins.end(), decision_time,
                               [](Utc t, const TafBulletin& b) { return t < b.issue_time; });
    if (it == bulletins.begin()) return nullptr;
    return &*std::prev(it);
}

void sort_by_issue_time(std::vector<TafBulletin>& bulletins) {
    std::stable_sort(bulletins.begin(), bulletins.end(),
                     [](const TafBulletin& a, const TafBulletin& b) { return a.issue_time < b.issue_time; });
}

} // namespace visnow
