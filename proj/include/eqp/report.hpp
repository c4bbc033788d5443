#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eqp/errors.hpp"

namespace eqp {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_shortest(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Two decimals, ties rounded to even on the scaled value.
inline std::string format_fixed2(double v) {
    if (!std::isfinite(v)) return format_shortest(v);
    double cents = std::nearbyint(v * 100.0);  // default rounding mode: half to even
    if (cents == 0.0) cents = 0.0;             // no "-0.00"
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, cents / 100.0, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

/// A cell is empty, a number, an integer, or text.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

/// Column-named rows, rendered as CSV or JSON with identical values.
struct RecordTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) {
            throw ConfigError("RecordTable: row has " + std::to_string(row.size()) +
                              " cells, expected " + std::to_string(columns.size()));
        }
        rows.push_back(std::move(row));
    }
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::string cell_text(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return format_shortest(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

inline nlohmann::ordered_json cell_json(const Cell& cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double v) const {
            if (!std::isfinite(v)) return nullptr;
            return v;
        }
        nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
        nlohmann::ordered_json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

}  // namespace detail

/// Header row, then one line per row. LF line endings, no trailing spaces.
inline void write_csv(std::ostream& os, const RecordTable& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) os << ',';
        os << detail::csv_escape(table.columns[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << detail::csv_escape(detail::cell_text(row[i]));
        }
        os << '\n';
    }
}

/// Array of objects keyed by column name; empty cells become null.
inline nlohmann::ordered_json to_json(const RecordTable& table) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = detail::cell_json(row[i]);
        arr.push_back(std::move(obj));
    }
    return arr;
}

inline void write_json(std::ostream& os, const RecordTable& table) {
    os << to_json(table).dump(2) << '\n';
}

enum class OutputFormat { Csv, Json };

inline void write_records(std::ostream& os, const RecordTable& table, OutputFormat format) {
    if (format == OutputFormat::Json) {
        write_json(os, table);
    } else {
        write_csv(os, table);
    }
}

}  // namespace eqp
