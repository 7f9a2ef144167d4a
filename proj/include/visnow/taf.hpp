#pragma once

#include "visnow/time.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace visnow {

enum class GroupKind { base, fm, becmg, tempo, prob };

std::string_view to_string(GroupKind kind);

/// Half-open UTC interval [start, end). `closed_end` marks windows that run
/// to the end of the bulletin validity, which is itself inclusive.
struct TimeWindow {
    Utc start{};
    Utc end{};
    bool closed_end = false;

    bool contains(Utc t) const { return t >= start && (t < end || (closed_end && t == end)); }
};

struct ForecastGroup {
    GroupKind kind = GroupKind::base;
    /// Period during which this group's visibility applies.
    TimeWindow window;
    /// BECMG only: the transition period as written in the bulletin.
    std::optional<TimeWindow> transition;
    std::optional<double> visibility_sm;
    /// True when visibility was copied from the prevailing group.
    bool visibility_inherited = false;
    std::optional<int> probability_pct;
    std::string text;
};

struct TafBulletin {
    std::string station;
    Utc issue_time{};
    Utc valid_from{};
    Utc valid_to{};
    bool amended = false;
    bool corrected = false;
    std::vector<ForecastGroup> groups;
    std::string raw;

    bool covers(Utc t) const { return t >= valid_from && t <= valid_to; }
};

/// Decode one TAF bulletin. The issue day is resolved against `reference`
/// (the archive issue timestamp). Throws MalformedBulletin or
/// UnresolvableGroupTime.
TafBulletin parse_taf(std::string_view raw, Utc reference);

/// Worst-case (minimum) visibility over all groups in force at `t`;
/// nullopt outside the validity window or if no applicable group carries a
/// visibility.
std::optional<double> resolve_visibility(const TafBulletin& bulletin, Utc t);

/// IFR predicted (< 3 SM) at `t`; nullopt when the bulletin does not cover t.
std::optional<int> taf_predicts_ifr(const TafBulletin& bulletin, Utc t);

/// Latest bulletin issued at or before `decision_time`, or nullptr.
/// `bulletins` must be sorted by issue time.
const TafBulletin* select_bulletin(std::span<const TafBulletin> bulletins, Utc decision_time);

/// Sort by issue time (stable).
void sort_by_issue_time(std::vector<TafBulletin>& bulletins);

} // namespace visnow
