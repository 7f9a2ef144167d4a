#pragma once

#include "visnow/metar.hpp"
#include "visnow/taf.hpp"

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace visnow {

struct ArchiveStats {
    std::size_t rows = 0;
    std::size_t parsed = 0;
    /// Rows skipped because the report or its timestamp did not decode.
    std::size_t rejected = 0;
    std::vector<std::string> first_errors;
};

/// CSV with columns station, valid, metar (extra columns ignored). The valid
/// timestamp anchors the report day. Undecodable rows are counted, not fatal.
std::vector<Observation> read_metar_archive(std::istream& in, ArchiveStats* stats = nullptr);

/// CSV with columns station, issued_utc, raw_taf.
std::vector<TafBulletin> read_taf_archive(std::istream& in, ArchiveStats* stats = nullptr);

/// Reads every *.txt chunk in `dir` in name order.
std::vector<Observation> read_metar_dir(const std::filesystem::path& dir, ArchiveStats* stats = nullptr);
std::vector<TafBulletin> read_taf_dir(const std::filesystem::path& dir, ArchiveStats* stats = nullptr);

/// One raw report per line; blank and '#' lines skipped. Days resolve
/// against `reference`.
std::vector<Observation> read_metar_lines(std::istream& in, Utc reference, ArchiveStats* stats = nullptr);

void write_metar_archive_header(std::ostream& out);
void write_metar_archive_row(std::ostream& out, const Observation& obs);

} // namespace visnow
