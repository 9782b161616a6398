#pragma once

// CSV emission with #-prefixed metadata headers and fixed-significance
// numeric formatting, shared by sweeps and figure bundles.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasepump {

inline constexpr const char* tool_version = "0.1.0";

// 12 significant digits; the same string for the same double everywhere
inline std::string format_sig(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// FNV-1a, enough to tie an output file to the exact config text
inline std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
    }

    void metadata(const std::string& key, const std::string& value) {
        out_ << "# " << key << ": " << value << "\n";
    }

    void header(const std::vector<std::string>& cols) {
        join(cols);
    }

    void row(const std::vector<std::string>& cells) {
        join(cells);
    }

    void row_numeric(const std::vector<double>& vals) {
        std::vector<std::string> cells;
        cells.reserve(vals.size());
        for (double v : vals) cells.push_back(format_sig(v));
        join(cells);
    }

  private:
    void join(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream out_;
};

// commas and newlines would break the row structure
inline std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace phasepump
