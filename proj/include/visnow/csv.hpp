#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace visnow::csv {

using Row = std::vector<std::string>;

/// Split one CSV record. Handles double-quoted fields with "" escapes;
/// embedded newlines are not supported.
Row split(std::string_view line);

/// Quote a field if it contains a separator, quote or leading/trailing space.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Reads a CSV stream with a header line. Lines starting with '#' and blank
/// lines are skipped.
class Reader {
public:
    explicit Reader(std::istream& in);

    const Row& header() const { return header_; }
    /// Column index by name, or nullopt.
    std::optional<size_t> column(std::string_view name) const;
    bool next(Row& row);
    size_t line_number() const { return line_no_; }

private:
    std::istream& in_;
    Row header_;
    size_t line_no_ = 0;
};

} // namespace visnow::csv
