#pragma once

// CSV ingestion for daily series and pre-blocked maxima, plus atomic file
// writing. Input files are UTF-8, comma-separated, header row required.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gevmix/blocking.hpp"
#include "gevmix/data.hpp"

namespace gevmix {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvSchema {
    std::string date_column = "date";
    std::string value_column = "value";
    std::string missing_token = "NA";
    bool strict = true;  // fail-closed on malformed rows
};

struct IngestReport {
    std::vector<DailyRecord> records;
    std::vector<std::string> row_errors;  // one line per malformed row
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline std::string strip(std::string s) {
    const auto from = s.find_first_not_of(" \t\r\n");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r\n");
    return s.substr(from, to - from + 1);
}

inline std::optional<double> parse_double(const std::string& s) {
    const std::string t = strip(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

inline std::optional<Date> parse_iso_date(const std::string& s) {
    const std::string t = strip(s);
    // YYYY-MM-DD
    if (t.size() != 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (std::sscanf(t.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return Date{y, m, d};
}

}  // namespace detail

/// Parses a daily series CSV. Rows carrying the missing token stay in the
/// output as missing-valued records; malformed rows are collected into the
/// report and, in strict mode, abort the ingestion.
inline IngestReport ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + ": missing header row");
    }
    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t date_idx = -1;
    std::ptrdiff_t value_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = detail::strip(header[i]);
        if (name == schema.date_column) date_idx = static_cast<std::ptrdiff_t>(i);
        if (name == schema.value_column) value_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (date_idx < 0 || value_idx < 0) {
        throw DataError(path.string() + ": header lacks '" + schema.date_column + "' or '" +
                        schema.value_column + "' column");
    }

    IngestReport report;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        const auto fail = [&](const std::string& why) {
            report.row_errors.push_back("line " + std::to_string(line_no) + ": " + why);
        };
        if (static_cast<std::ptrdiff_t>(fields.size()) <= std::max(date_idx, value_idx)) {
            fail("too few fields");
            continue;
        }
        const auto date = detail::parse_iso_date(fields[date_idx]);
        if (!date) {
            fail("unparseable date '" + detail::strip(fields[date_idx]) + "'");
            continue;
        }
        const std::string raw = detail::strip(fields[value_idx]);
        if (raw == schema.missing_token) {
            report.records.push_back(DailyRecord{*date, std::nullopt});
            continue;
        }
        const auto value = detail::parse_double(raw);
        if (!value || !std::isfinite(*value)) {
            fail("unparseable value '" + raw + "'");
            continue;
        }
        report.records.push_back(DailyRecord{*date, value});
    }
    if (schema.strict && !report.row_errors.empty()) {
        throw DataError(path.string() + ": " + std::to_string(report.row_errors.size()) +
                        " malformed row(s), first: " + report.row_errors.front());
    }
    return report;
}

/// Reads pre-blocked maxima: header `value` or `value,group`.
inline BlockMaximaSeries read_block_maxima_csv(const std::filesystem::path& path,
                                               const std::string& missing_token = "NA") {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + ": missing header row");
    }
    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t value_idx = -1;
    std::ptrdiff_t group_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = detail::strip(header[i]);
        if (name == "value") value_idx = static_cast<std::ptrdiff_t>(i);
        if (name == "group") group_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (value_idx < 0) {
        throw DataError(path.string() + ": header lacks 'value' column");
    }
    BlockMaximaSeries out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (static_cast<std::ptrdiff_t>(fields.size()) <= value_idx) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": too few fields");
        }
        const std::string raw = detail::strip(fields[value_idx]);
        if (raw == missing_token) continue;  // maxima files carry no holes
        const auto value = detail::parse_double(raw);
        if (!value || !std::isfinite(*value)) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": unparseable value '" + raw + "'");
        }
        out.values.push_back(*value);
        if (group_idx >= 0 && static_cast<std::ptrdiff_t>(fields.size()) > group_idx) {
            out.group_labels.push_back(detail::strip(fields[group_idx]));
        }
    }
    if (!out.group_labels.empty() && out.group_labels.size() != out.values.size()) {
        throw DataError(path.string() + ": inconsistent group column");
    }
    if (out.values.empty()) {
        throw DataError(path.string() + ": no observations");
    }
    return out;
}

/// Writes content to path atomically (temp file, then rename).
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write " + tmp.string());
        }
        out << content;
        if (!out.good()) {
            throw DataError("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace gevmix
