#pragma once

// CSV output with shortest round-trip numeric formatting (std::to_chars):
// reruns with identical inputs produce byte-identical files.

#include <charconv>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "basset/common.hpp"

namespace basset {

inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ValidationError("csv: not a number: '" + std::string(s) + "'");
    return v;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), cols_(columns.size()) {
        if (!out_) throw ValidationError("csv: cannot open " + path);
        std::string header;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) header += ',';
            header += columns[i];
        }
        out_ << header << '\n';
    }

    void row(std::span<const double> values) {
        if (values.size() != cols_)
            throw ValidationError("csv: row width mismatch");
        std::string line;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) line += ',';
            line += format_double(values[i]);
        }
        out_ << line << '\n';
    }

    void close() { out_.close(); }

private:
    std::ofstream out_;
    std::size_t cols_;
};

}  // namespace basset
