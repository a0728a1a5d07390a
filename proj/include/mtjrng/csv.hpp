#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mtjrng/errors.hpp"

namespace mtjrng {

// Shortest round-trippable decimal form of a double.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Minimal CSV writer: fixed header, numeric cells formatted for exact
// round-trip, no timestamps or other run-dependent noise.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("cannot open for writing: " + path);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
        cols_ = header.size();
    }

    void row(const std::vector<double>& cells) {
        if (cells.size() != cols_) throw Error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt_double(cells[i]);
        }
        out_ << '\n';
    }

    void row_raw(const std::vector<std::string>& cells) {
        if (cells.size() != cols_) throw Error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
    std::size_t cols_ = 0;
};

} // namespace mtjrng
