#pragma once

// CMAPSS text files: whitespace-separated rows of
//   unit  cycle  setting x3  sensor x21
// plus a companion RUL file with one integer per test engine, in unit order.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fttgru/error.hpp"

namespace fttgru::data {

inline constexpr std::size_t kSettings = 3;
inline constexpr std::size_t kSensors = 21;
inline constexpr std::size_t kFeatures = kSettings + kSensors;
inline constexpr std::size_t kColumns = 2 + kFeatures;

using FeatureRow = std::array<double, kFeatures>;

struct EngineSeries {
    int unit_id = 0;
    std::vector<int> cycles;                          // 1, 2, ..., n
    std::vector<std::array<double, kSettings>> settings;
    std::vector<std::array<double, kSensors>> sensors;

    std::size_t length() const noexcept { return cycles.size(); }

    /// Settings followed by sensors for row t.
    FeatureRow features(std::size_t t) const {
        FeatureRow row{};
        std::copy(settings[t].begin(), settings[t].end(), row.begin());
        std::copy(sensors[t].begin(), sensors[t].end(), row.begin() + kSettings);
        return row;
    }

    void push_back(int cycle, const FeatureRow& row) {
        cycles.push_back(cycle);
        std::array<double, kSettings> s{};
        std::array<double, kSensors> m{};
        std::copy_n(row.begin(), kSettings, s.begin());
        std::copy_n(row.begin() + kSettings, kSensors, m.begin());
        settings.push_back(s);
        sensors.push_back(m);
    }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

template <typename T>
std::optional<T> to_number(std::string_view field) {
    T v{};
    const char* first = field.data();
    const char* last = first + field.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return v;
}

inline std::ifstream open_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path, "cannot open file");
    }
    return in;
}

} // namespace detail

/// Parses CMAPSS rows from a stream. `source` names the input in error messages.
/// Blank lines are skipped. Engines come back ordered by unit id.
inline std::vector<EngineSeries> parse_cmapss(std::istream& in, const std::string& source) {
    struct Row {
        int cycle;
        std::size_t line;
        FeatureRow values;
    };
    std::map<int, std::vector<Row>> units;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        const auto fields = detail::split_fields(text);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != kColumns) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(kColumns) + " columns, found " +
                                 std::to_string(fields.size()));
        }
        const auto unit = detail::to_number<int>(fields[0]);
        const auto cycle = detail::to_number<int>(fields[1]);
        if (!unit || !cycle) {
            throw ParseError(source, line_no, "unit and cycle must be integers");
        }
        Row row{*cycle, line_no, {}};
        for (std::size_t j = 0; j < kFeatures; ++j) {
            const auto v = detail::to_number<double>(fields[2 + j]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError(source, line_no,
                                 "column " + std::to_string(3 + j) + " is not a number: '" +
                                     std::string(fields[2 + j]) + "'");
            }
            row.values[j] = *v;
        }
        units[*unit].push_back(row);
    }
    if (in.bad()) {
        throw IoError(source, "read failed");
    }

    std::vector<EngineSeries> out;
    out.reserve(units.size());
    for (auto& [unit, rows] : units) {
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.cycle < b.cycle; });
        EngineSeries e;
        e.unit_id = unit;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].cycle != static_cast<int>(i) + 1) {
                throw ParseError(source, rows[i].line,
                                 "unit " + std::to_string(unit) + ": expected cycle " + std::to_string(i + 1) +
                                     ", found " + std::to_string(rows[i].cycle));
            }
            e.push_back(rows[i].cycle, rows[i].values);
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline std::vector<EngineSeries> parse_cmapss(const std::string& path) {
    auto in = detail::open_text(path);
    return parse_cmapss(in, path);
}

/// Ground-truth RUL file: one non-negative integer per non-blank line.
inline std::vector<double> parse_rul_file(std::istream& in, const std::string& source) {
    std::vector<double> out;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        const auto fields = detail::split_fields(text);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != 1) {
            throw ParseError(source, line_no, "expected one value per line");
        }
        const auto v = detail::to_number<int>(fields[0]);
        if (!v || *v < 0) {
            throw ParseError(source, line_no, "RUL must be a non-negative integer");
        }
        out.push_back(static_cast<double>(*v));
    }
    return out;
}

inline std::vector<double> parse_rul_file(const std::string& path) {
    auto in = detail::open_text(path);
    return parse_rul_file(in, path);
}

/// RUL at every cycle of a run-to-failure series: last_cycle - cycle, optionally capped.
inline std::vector<double> label_rul(const EngineSeries& e, std::optional<int> cap = std::nullopt) {
    if (e.length() == 0) {
        throw ShapeError("label_rul: engine " + std::to_string(e.unit_id) + " has no rows");
    }
    if (cap && *cap < 0) {
        throw ConfigError("label_rul: cap must be non-negative");
    }
    const int last = e.cycles.back();
    std::vector<double> out(e.length());
    for (std::size_t t = 0; t < e.length(); ++t) {
        int rul = last - e.cycles[t];
        if (cap) {
            rul = std::min(rul, *cap);
        }
        out[t] = rul;
    }
    return out;
}

} // namespace fttgru::data
