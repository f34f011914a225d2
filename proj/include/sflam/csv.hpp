#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace sflam {

inline constexpr std::string_view kCsvVersion = "sflam-csv v1";

/// Shortest round-trip representation, locale independent.
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

inline std::string format_number(std::int64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(int v) { return format_number(static_cast<std::int64_t>(v)); }
inline std::string format_number(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Quotes a field when it holds a comma, quote or line break.
inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

/// In-memory table: one "# sflam-csv v1 <schema>" comment line, a header row,
/// then data rows, LF terminated.
class CsvTable {
public:
    CsvTable(std::string schema, std::vector<std::string> columns)
        : schema_(std::move(schema)), columns_(std::move(columns)) {}

    CsvTable& row(std::vector<std::string> cells) {
        rows_.push_back(std::move(cells));
        return *this;
    }

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

    std::string str() const {
        std::string out = "# ";
        out += kCsvVersion;
        out += ' ';
        out += schema_;
        out += '\n';
        append_line(out, columns_);
        for (const auto& r : rows_) {
            append_line(out, r);
        }
        return out;
    }

private:
    static void append_line(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += csv_escape(cells[i]);
        }
        out += '\n';
    }

    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Minimal reader for tables written by CsvTable (used by tests and tools).
/// Comment lines are skipped; the first remaining line is the header.
struct ParsedCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) {
                return i;
            }
        }
        return columns.size();
    }
};

inline ParsedCsv parse_csv(std::string_view text) {
    ParsedCsv out;
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    bool at_line_start = true;
    bool comment = false;
    bool header_done = false;

    auto end_line = [&] {
        cells.push_back(std::move(cell));
        cell.clear();
        if (!header_done) {
            out.columns = std::move(cells);
            header_done = true;
        } else {
            out.rows.push_back(std::move(cells));
        }
        cells.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (at_line_start) {
            at_line_start = false;
            comment = c == '#';
        }
        if (comment) {
            if (c == '\n') {
                at_line_start = true;
            }
            continue;
        }
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            end_line();
            at_line_start = true;
        } else if (c != '\r') {
            cell += c;
        }
    }
    if (!cell.empty() || !cells.empty()) {
        end_line();
    }
    return out;
}

} // namespace sflam
