// table.hpp — numeric result tables with a commented metadata header, CSV
// serialization (shortest round-trip number formatting, locale independent) and
// the matching reader.

#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spincavity {

inline constexpr const char* kVersion = "0.1.0";

inline std::uint64_t fnv1a_hash(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size())
            throw std::invalid_argument("ResultTable: row width mismatch");
        rows.push_back(std::move(row));
    }
};

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline void write_csv(const ResultTable& table, std::ostream& out) {
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << ": " << value << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << detail::format_number(row[c]) << (c + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    write_csv(table, out);
    return out.str();
}

inline ResultTable read_csv(std::istream& in) {
    ResultTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            std::string key = line.substr(1, colon == std::string::npos
                                                 ? std::string::npos
                                                 : colon - 1);
            std::string value =
                colon == std::string::npos ? "" : line.substr(colon + 1);
            auto strip = [](std::string& s) {
                while (!s.empty() && s.front() == ' ')
                    s.erase(s.begin());
                while (!s.empty() && s.back() == ' ')
                    s.pop_back();
            };
            strip(key);
            strip(value);
            table.metadata.emplace_back(key, value);
            continue;
        }
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (!header_seen) {
            table.columns = cells;
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        for (const std::string& cell : cells) {
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{})
                throw std::runtime_error("read_csv: malformed number '" + cell + "'");
            row.push_back(v);
        }
        table.add_row(std::move(row));
    }
    return table;
}

inline ResultTable read_csv(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

}  // namespace spincavity
