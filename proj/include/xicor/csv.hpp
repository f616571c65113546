#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "xicor/error.hpp"

// Minimal delimited-text ingestion for two numeric columns. Decimal parsing
// is locale-independent (std::from_chars, dot only); no quoting dialects.

namespace xicor {

struct CsvOptions {
    char delimiter = ',';
    std::string x_column = "0";  // 0-based index or header name
    std::string y_column = "1";
};

struct CsvData {
    std::vector<double> xs;
    std::vector<double> ys;
    bool had_header = false;
};

namespace csv_detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delimiter) {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);  // from_chars has no '+'
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline bool is_index(std::string_view selector) {
    if (selector.empty()) return false;
    for (char c : selector)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace csv_detail

/// Parses two numeric columns out of delimited text. Column selectors are
/// 0-based indices or header names; a header row is consumed when a selector
/// is a name, or when the first row's selected cells fail to parse as
/// numbers. Rows with a deviating field count or empty/non-numeric selected
/// cells are errors, never silently dropped.
inline CsvData parse_paired_csv(std::string_view text, const CsvOptions& options) {
    using namespace csv_detail;

    std::vector<std::string_view> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("empty input", 1);

    const bool by_name = !is_index(options.x_column) || !is_index(options.y_column);
    std::size_t col_x = 0, col_y = 0;
    std::size_t first_data_line = 0;
    bool had_header = false;

    const auto first_fields = split_fields(lines[0], options.delimiter);
    if (by_name) {
        had_header = true;
        first_data_line = 1;
        bool found_x = false, found_y = false;
        for (std::size_t j = 0; j < first_fields.size(); ++j) {
            const auto name = trim(first_fields[j]);
            if (!found_x && (is_index(options.x_column)
                                 ? j == std::stoul(options.x_column)
                                 : name == options.x_column)) {
                col_x = j;
                found_x = true;
            }
            if (!found_y && (is_index(options.y_column)
                                 ? j == std::stoul(options.y_column)
                                 : name == options.y_column)) {
                col_y = j;
                found_y = true;
            }
        }
        if (!found_x) throw ParseError("column '" + options.x_column + "' not found in header", 1);
        if (!found_y) throw ParseError("column '" + options.y_column + "' not found in header", 1);
    } else {
        col_x = std::stoul(options.x_column);
        col_y = std::stoul(options.y_column);
        const std::size_t needed = std::max(col_x, col_y);
        if (needed >= first_fields.size())
            throw ParseError("row has fewer columns than requested", 1);
        double ignored;
        if (!parse_double(first_fields[col_x], ignored) ||
            !parse_double(first_fields[col_y], ignored)) {
            had_header = true;  // only the very first row may act as a header
            first_data_line = 1;
        }
    }
    if (col_x == col_y) throw DomainError("x and y column selectors must differ");

    const std::size_t expected_fields =
        split_fields(lines[had_header ? 0 : first_data_line], options.delimiter).size();

    CsvData data;
    data.had_header = had_header;
    for (std::size_t row = first_data_line; row < lines.size(); ++row) {
        const auto fields = split_fields(lines[row], options.delimiter);
        if (fields.size() != expected_fields)
            throw ParseError("row length mismatch", row + 1);
        double x, y;
        if (!parse_double(fields[col_x], x))
            throw ParseError("cell in x column is not a number", row + 1);
        if (!parse_double(fields[col_y], y))
            throw ParseError("cell in y column is not a number", row + 1);
        data.xs.push_back(x);
        data.ys.push_back(y);
    }
    if (data.xs.empty()) throw ParseError("no data rows", lines.size());
    return data;
}

}  // namespace xicor
