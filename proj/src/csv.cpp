#include "tmlg/csv.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace tmlg::csv {

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    while (true) {
        if (!std::getline(in_, buffer_)) return false;
        ++physical_line_;
        if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
        if (!buffer_.empty()) break;
    }
    record_line_ = physical_line_;

    // Fast path: nothing quoted.
    if (buffer_.find('"') == std::string::npos) {
        std::size_t start = 0;
        while (true) {
            std::size_t pos = buffer_.find(delimiter_, start);
            if (pos == std::string::npos) {
                fields.emplace_back(buffer_, start);
                return true;
            }
            fields.emplace_back(buffer_, start, pos - start);
            start = pos + 1;
        }
    }

    std::string field;
    bool in_quotes = false;
    std::size_t i = 0;
    while (true) {
        if (i == buffer_.size()) {
            if (!in_quotes) break;
            // Quoted field spans a line break.
            std::string more;
            if (!std::getline(in_, more)) throw std::runtime_error("unterminated quoted field starting on line " +
                                                                    std::to_string(record_line_));
            ++physical_line_;
            if (!more.empty() && more.back() == '\r') more.pop_back();
            buffer_ += '\n';
            buffer_ += more;
            continue;
        }
        char c = buffer_[i++];
        if (in_quotes) {
            if (c == '"') {
                if (i < buffer_.size() && buffer_[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == delimiter_) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

char detect_delimiter(std::string_view header_line) {
    char best = ',';
    std::ptrdiff_t best_count = 0;
    for (char candidate : {',', '\t', ';', '|'}) {
        auto n = std::count(header_line.begin(), header_line.end(), candidate);
        if (n > best_count) {
            best = candidate;
            best_count = n;
        }
    }
    return best;
}

std::string escape(std::string_view field, char delimiter) {
    bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << delimiter;
        out << escape(fields[i], delimiter);
    }
    out << '\n';
}

std::string normalize_header(std::string_view name) {
    // Some exports prefix the first header with a UTF-8 byte order mark.
    if (name.substr(0, 3) == "\xEF\xBB\xBF") name.remove_prefix(3);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    std::string out(name);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace tmlg::csv
