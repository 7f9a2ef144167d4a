#include "visnow/archive.hpp"

#include "visnow/csv.hpp"
#include "visnow/errors.hpp"

#include <algorithm>
#include <fstream>

namespace visnow {

namespace {

void note_error(ArchiveStats* stats, std::size_t line, const std::string& what) {
    if (!stats) return;
    ++stats->rejected;
    if (stats->first_errors.size() < 10) stats->first_errors.push_back("line " + std::to_string(line) + ": " + what);
}

std::size_t require(const csv::Reader& r, std::string_view name) {
    auto c = r.column(name);
    if (!c) throw DataError("archive is missing column '" + std::string(name) + "'");
    return *c;
}

template <class T, class Fn> std::vector<T> read_rows(std::istream& in, ArchiveStats* stats, const char* time_col,
                                                      const char* text_col, Fn decode) {
    csv::Reader reader(in);
    if (reader.header().empty()) return {};
    std::size_t tc = require(reader, time_col), xc = require(reader, text_col);
    std::vector<T> out;
    csv::Row row;
    while (reader.next(row)) {
        if (stats) ++stats->rows;
        if (row.size() <= std::max(tc, xc)) {
            note_error(stats, reader.line_number(), "short row");
            continue;
        }
        auto when = parse_utc(row[tc]);
        if (!when) {
            note_error(stats, reader.line_number(), "bad timestamp '" + row[tc] + "'");
            continue;
        }
        try {
            out.push_back(decode(row[xc], *when));
            if (stats) ++stats->parsed;
        } catch (const DataError& e) {
            note_error(stats, reader.line_number(), e.what());
        }
    }
    return out;
}

std::vector<std::filesystem::path> chunk_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) throw DataError("no archive directory " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

std::vector<Observation> read_metar_archive(std::istream& in, ArchiveStats* stats) {
    return read_rows<Observation>(in, stats, "valid", "metar",
                                  [](const std::string& text, Utc when) { return parse_metar(text, when); });
}

std::vector<TafBulletin> read_taf_archive(std::istream& in, ArchiveStats* stats) {
    return read_rows<TafBulletin>(in, stats, "issued_utc", "raw_taf",
                                  [](const std::string& text, Utc when) { return parse_taf(text, when); });
}

std::vector<Observation> read_metar_dir(const std::filesystem::path& dir, ArchiveStats* stats) {
    std::vector<Observation> out;
    for (const auto& f : chunk_files(dir)) {
        std::ifstream in(f);
        auto part = read_metar_archive(in, stats);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

std::vector<TafBulletin> read_taf_dir(const std::filesystem::path& dir, ArchiveStats* stats) {
    std::vector<TafBulletin> out;
    for (const auto& f : chunk_files(dir)) {
        std::ifstream in(f);
        auto part = read_taf_archive(in, stats);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

std::vector<Observation> read_metar_lines(std::istream& in, Utc reference, ArchiveStats* stats) {
    std::vector<Observation> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        if (stats) ++stats->rows;
        try {
            out.push_back(parse_metar(line, reference));
            if (stats) ++stats->parsed;
        } catch (const DataError& e) {
            note_error(stats, n, e.what());
        }
    }
    return out;
}

void write_metar_archive_header(std::ostream& out) { csv::write_row(out, {"station", "valid", "metar"}); }

void write_metar_archive_row(std::ostream& out, const Observation& obs) {
    std::string valid = format_utc(obs.time);
    valid[10] = ' ';
    valid.pop_back();
    csv::write_row(out, {obs.station, valid, obs.raw});
}

} // namespace visnow
