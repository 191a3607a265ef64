#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "kml/errors.hpp"

namespace kml {

/// RFC-4180-style writer: UTF-8, '.' decimal separator, fields quoted only
/// when they contain separators, '#'-prefixed comment lines. Doubles are
/// rendered with the shortest round-trip representation so re-runs emit
/// byte-identical rows.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw config_error("csv: cannot open " + path);
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i != 0) out_ << ',';
            out_ << escape(fields[i]);
        }
        out_ << "\n";
    }

    static std::string field(double v) {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }
    static std::string field(long long v) { return std::to_string(v); }
    static std::string field(int v) { return std::to_string(v); }
    static std::string field(std::uint64_t v) { return std::to_string(v); }
    static std::string field(bool v) { return v ? "true" : "false"; }

private:
    static std::string escape(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += "\"\"";
            else quoted += c;
        }
        quoted += '"';
        return quoted;
    }

    std::ofstream out_;
};

} // namespace kml
