#pragma once

// CSV artifacts. Every file starts with a schema comment line, then a header row:
//
//   # fttgru:<schema> v<version>
//   col_a,col_b,...

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fttgru/error.hpp"

namespace fttgru::io {

inline constexpr int kCsvSchemaVersion = 1;

/// Shortest text that reads back to the same double. NaN prints as "nan".
inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Fixed-point text with `digits` decimals, for human-facing tables.
inline std::string format_fixed(double v, int digits) {
    if (!std::isfinite(v)) {
        return format_number(v);
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(std::string path, const std::string& schema, const std::vector<std::string>& header)
        : path_(std::move(path)), columns_(header.size()), out_(path_, std::ios::trunc) {
        if (!out_) {
            throw IoError(path_, "cannot open for writing");
        }
        out_ << "# fttgru:" << schema << " v" << kCsvSchemaVersion << '\n';
        write(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) {
            throw ShapeError(path_ + ": row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(columns_));
        }
        write(cells);
    }

    /// Flushes and reports any write failure.
    void close() {
        out_.flush();
        if (!out_) {
            throw IoError(path_, "write failed");
        }
        out_.close();
    }

    const std::string& path() const noexcept { return path_; }

private:
    void write(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].find_first_of(",\n\"") != std::string::npos) {
                throw ShapeError(path_ + ": cell contains a separator: " + cells[i]);
            }
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << '\n';
    }

    std::string path_;
    std::size_t columns_;
    std::ofstream out_;
};

struct CsvTable {
    std::string schema;  // the comment line without "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        throw ShapeError("no column '" + std::string(name) + "'");
    }

    double number(std::size_t row, std::string_view name) const {
        const std::string& cell = rows.at(row).at(column(name));
        if (cell == "nan") {
            return std::nan("");
        }
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
            throw ShapeError("column '" + std::string(name) + "' holds a non-number: " + cell);
        }
        return v;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path, "cannot open");
    }
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!s.empty() && s.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (t.schema.empty()) {
                t.schema = line.substr(line.find_first_not_of("# "));
            }
            continue;
        }
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
        } else if (cells.size() != t.header.size()) {
            throw ParseError(path, line_no, "expected " + std::to_string(t.header.size()) + " cells");
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.header.empty()) {
        throw ParseError(path, line_no, "missing header row");
    }
    return t;
}

} // namespace fttgru::io
