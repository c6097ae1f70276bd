#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace fedwarn::csv {

// All floats are printed with 9 significant digits so outputs are
// byte-stable across runs and platforms.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::string escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\n") != std::string_view::npos;
    if (!needs_quotes) {
        return std::string(field);
    }
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Builds a CSV document in memory; callers write the finished string to
/// disk in one pass so failed runs never leave partial files behind.
class Table {
  public:
    explicit Table(const std::vector<std::string>& header) { emit_row(header); }

    Table& cell(std::string_view s) {
        row_.push_back(escape(s));
        return *this;
    }
    Table& cell(double v) {
        row_.push_back(format_double(v));
        return *this;
    }
    Table& cell(std::uint64_t v) {
        row_.push_back(std::to_string(v));
        return *this;
    }
    Table& cell(int v) { return cell(static_cast<std::uint64_t>(v)); }

    void end_row() {
        emit_row(row_);
        row_.clear();
    }

    const std::string& str() const { return out_; }

  private:
    void emit_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out_.push_back(',');
            }
            out_ += cells[i];
        }
        out_.push_back('\n');
    }

    std::string out_;
    std::vector<std::string> row_;
};

} // namespace fedwarn::csv
