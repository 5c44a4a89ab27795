#pragma once

// CSV reading and writing for accuracy samples and sweep tables. All floats
// are printed with 9 significant digits, which round-trips through the
// readers exactly.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "iotprice/errors.hpp"
#include "iotprice/quality.hpp"

namespace iotprice::csv {

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

inline double parse_number(const std::string& field, std::size_t line) {
    if (field.empty()) throw ParseError(line, "empty numeric field");
    char* end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw ParseError(line, "not a number: '" + field + "'");
    return v;
}

}  // namespace detail

// Accuracy samples: header "n,accuracy", one sample per row.
inline void write_samples(std::ostream& out, const std::vector<AccuracySample>& samples) {
    out << "n,accuracy\n";
    for (const auto& s : samples)
        out << format_number(s.n) << ',' << format_number(s.accuracy) << '\n';
}

inline std::vector<AccuracySample> read_samples(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty file");
    ++lineno;
    if (detail::split_fields(line) != std::vector<std::string>{"n", "accuracy"})
        throw ParseError(lineno, "expected header 'n,accuracy'");
    std::vector<AccuracySample> samples;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_fields(line);
        if (fields.size() != 2) throw ParseError(lineno, "expected two fields");
        samples.push_back({detail::parse_number(fields[0], lineno),
                           detail::parse_number(fields[1], lineno)});
    }
    return samples;
}

// Generic numeric table, used to re-read sweep output.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline Table read_table(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty file");
    ++lineno;
    Table t;
    t.header = detail::split_fields(line);
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_fields(line);
        if (fields.size() != t.header.size())
            throw ParseError(lineno, "expected " + std::to_string(t.header.size()) + " fields");
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(detail::parse_number(f, lineno));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace iotprice::csv
