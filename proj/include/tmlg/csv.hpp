#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tmlg::csv {

/// Streaming RFC-4180 reader. Quoted fields may contain the delimiter,
/// doubled quotes and line breaks. A trailing '\r' is stripped.
class Reader {
public:
    explicit Reader(std::istream& in, char delimiter = ',') : in_(in), delimiter_(delimiter) {}

    /// Reads the next record into `fields`. Returns false at end of input.
    /// Blank lines are skipped.
    bool next(std::vector<std::string>& fields);

    /// Physical line on which the last returned record started (1-based).
    std::size_t line() const { return record_line_; }

    char delimiter() const { return delimiter_; }
    void set_delimiter(char d) { delimiter_ = d; }

private:
    std::istream& in_;
    char delimiter_;
    std::size_t physical_line_ = 0;
    std::size_t record_line_ = 0;
    std::string buffer_;
};

/// Picks the delimiter of a header line among ',', '\t', ';' and '|'.
char detect_delimiter(std::string_view header_line);

/// Quotes a field when it contains the delimiter, a quote or a line break.
std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

/// Lower-cased copy with surrounding whitespace removed.
std::string normalize_header(std::string_view name);

}  // namespace tmlg::csv
