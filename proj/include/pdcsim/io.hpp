#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <pdcsim/errors.hpp>

namespace pdcsim::io {

/// 12 significant digits, scientific notation, locale-free.  Infinities
/// render as "inf"/"-inf" (the CSV divergence marker); -0 normalizes to +0.
inline std::string format_sig12(double v) {
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                   std::chars_format::scientific, 11);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Strict numeric parse accepting the emitter's own tokens.
inline double parse_number(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError("not a number: '" + s + "'");
    return value;
}

/// One output cell: a pre-formatted number, free text, or an absent value.
struct Cell {
    enum class Kind { number, text, nil } kind = Kind::nil;
    std::string value;
};

inline Cell num_cell(double v) {
    return {Cell::Kind::number, format_sig12(v)};
}
inline Cell int_cell(long long v) {
    return {Cell::Kind::number, format_int(v)};
}
inline Cell text_cell(std::string s) {
    return {Cell::Kind::text, std::move(s)};
}
inline Cell nil_cell() { return {}; }

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

}  // namespace detail

/// Header row plus data rows, comma-separated, '\n' line ends, absent values
/// as empty fields.
inline void write_csv(std::ostream& os, const std::vector<std::string>& columns,
                      const std::vector<std::vector<Cell>>& rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) os << ',';
        os << detail::csv_escape(columns[c]);
    }
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) os << ',';
            switch (row[c].kind) {
                case Cell::Kind::number: os << row[c].value; break;
                case Cell::Kind::text:
                    os << detail::csv_escape(row[c].value);
                    break;
                case Cell::Kind::nil: break;
            }
        }
        os << '\n';
    }
}

/// Same table as an object {"columns": [...], "rows": [[...], ...]}; numeric
/// cells are emitted raw except non-finite markers, which become strings, and
/// absent values, which become null.
inline void write_json(std::ostream& os,
                       const std::vector<std::string>& columns,
                       const std::vector<std::vector<Cell>>& rows) {
    os << "{\n  \"columns\": [";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) os << ", ";
        os << detail::json_escape(columns[c]);
    }
    os << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << (r ? ",\n    [" : "\n    [");
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c) os << ", ";
            const Cell& cell = rows[r][c];
            switch (cell.kind) {
                case Cell::Kind::number:
                    if (cell.value == "inf" || cell.value == "-inf" ||
                        cell.value == "nan")
                        os << detail::json_escape(cell.value);
                    else
                        os << cell.value;
                    break;
                case Cell::Kind::text:
                    os << detail::json_escape(cell.value);
                    break;
                case Cell::Kind::nil: os << "null"; break;
            }
        }
        os << ']';
    }
    os << "\n  ]\n}\n";
}

/// Parsed CSV: column names and raw string cells (quotes resolved).
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> cells;

    /// Index of a named column; throws if missing.
    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ConfigError("no such column: " + name);
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

inline CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            table.columns = split_csv_line(line);
            first = false;
        } else {
            table.cells.push_back(split_csv_line(line));
        }
    }
    return table;
}

}  // namespace pdcsim::io
