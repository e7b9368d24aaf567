#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "qmod/errors.hpp"

namespace qmod::table {

using Cell = std::variant<double, std::int64_t, std::string>;

/// 17 significant digits, scientific; enough to round-trip any double and
/// fixed so that identical runs emit identical bytes.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

inline std::string format_cell(const Cell& c) {
    if (std::holds_alternative<double>(c))
        return format_double(std::get<double>(c));
    if (std::holds_alternative<std::int64_t>(c))
        return std::to_string(std::get<std::int64_t>(c));
    return std::get<std::string>(c);
}

inline std::string escape_json(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\')
            out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

/// Rectangular named-column table; the "provenance" column tags each row as
/// analytic or numeric.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw Error("ResultTable: row width does not match the header");
        rows.push_back(std::move(row));
    }

    /// UTF-8, comma separated, LF line endings, header first.
    std::string to_csv() const {
        std::string out;
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i)
                out.push_back(',');
            out += columns[i];
        }
        out.push_back('\n');
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i)
                    out.push_back(',');
                out += format_cell(row[i]);
            }
            out.push_back('\n');
        }
        return out;
    }

    /// Array of flat objects with identical keys, numbers in the same fixed
    /// format as the csv output.
    std::string to_json() const {
        std::string out = "[\n";
        for (size_t r = 0; r < rows.size(); ++r) {
            out += "  {";
            for (size_t i = 0; i < columns.size(); ++i) {
                if (i)
                    out += ", ";
                out += '"' + escape_json(columns[i]) + "\": ";
                const Cell& c = rows[r][i];
                if (std::holds_alternative<std::string>(c))
                    out += '"' + escape_json(std::get<std::string>(c)) + '"';
                else
                    out += format_cell(c);
            }
            out += (r + 1 < rows.size()) ? "},\n" : "}\n";
        }
        out += "]\n";
        return out;
    }

    std::string serialize(const std::string& format) const {
        if (format == "csv")
            return to_csv();
        if (format == "json")
            return to_json();
        throw ConfigError("unknown output format: " + format);
    }
};

} // namespace qmod::table
