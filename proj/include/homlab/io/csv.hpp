#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "homlab/core/types.hpp"

namespace homlab::io {

/// Number with 12 significant digits, '.' decimal separator, locale independent.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

using Cell = std::variant<std::string, double, long long>;

/// In-memory CSV table: a header row and rows of equal width.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
        require(!header_.empty(), "csv table needs at least one column");
    }

    void add_row(std::vector<Cell> row) {
        require(row.size() == header_.size(), "csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t rows() const noexcept { return rows_.size(); }
    const std::vector<std::string>& header() const noexcept { return header_; }

    std::string str() const {
        std::string out;
        append_line(out, header_);
        for (const auto& r : rows_) {
            std::vector<std::string> cells;
            cells.reserve(r.size());
            for (const auto& c : r) cells.push_back(render(c));
            append_line(out, cells);
        }
        return out;
    }

private:
    static std::string render(const Cell& c) {
        if (const auto* s = std::get_if<std::string>(&c)) return *s;
        if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
        return std::to_string(std::get<long long>(c));
    }

    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    }

    static void append_line(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += quote(cells[i]);
        }
        out += '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// Writes `content` to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(os), "cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        require(static_cast<bool>(os), "failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace homlab::io
