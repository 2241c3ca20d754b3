#pragma once

// CSV artifacts: comment lines starting with '#', one header line, then rows.
// Floats are written in e-notation with 17 significant digits, so every
// double round-trips exactly.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "pathlab/core/error.hpp"

namespace pathlab::io {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

/// RFC 4180 quoting: fields with a comma, quote or line break are quoted and
/// inner quotes doubled.
inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

using Cell = std::variant<double, std::int64_t, std::string, bool>;

inline std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return quote_field(std::get<std::string>(c));
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
        require(!columns_.empty(), "csv table needs at least one column");
    }

    void comment(const std::string& line) { comments_.push_back(line); }

    void add_row(std::vector<Cell> row) {
        require(row.size() == columns_.size(), "csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::string out;
        for (const auto& c : comments_) out += "# " + c + "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + quote_field(columns_[i]);
        out += "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
            out += "\n";
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        require(static_cast<bool>(f), "cannot write " + path.string());
        f << str();
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<Cell>> rows_;
};

} // namespace pathlab::io
