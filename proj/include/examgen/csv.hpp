#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "examgen/errors.hpp"

namespace examgen::csv {

// All engine CSV files are header-first, comma-separated, UTF-8, '\n'
// line endings, no quoting. Fields therefore must not contain commas.

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

// Shortest exact round-trip representation of a double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        // try shorter forms for readability, keeping exactness
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            double b2 = 0.0;
            std::sscanf(shorter, "%lf", &b2);
            if (b2 == v) return shorter;
        }
    }
    return buf;
}

inline double parse_double(const std::string& s, const std::string& file, long line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, line, "expected a number, got '" + s + "'");
    }
}

inline long parse_long(const std::string& s, const std::string& file, long line) {
    long v = 0;
    const auto* b = s.data();
    const auto* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
        throw ParseError(file, line, "expected an integer, got '" + s + "'");
    }
    return v;
}

class Reader {
public:
    Reader(const std::string& path, const std::vector<std::string>& columns)
        : path_(path), in_(path) {
        if (!in_) throw IoError("cannot open " + path);
        std::string header;
        if (!std::getline(in_, header)) {
            throw ParseError(path_, 1, "empty file, expected header row");
        }
        if (!header.empty() && header.back() == '\r') header.pop_back();
        const auto fields = split(header);
        if (fields.size() != columns.size()) {
            throw ParseError(path_, 1, "expected " + std::to_string(columns.size()) + " header columns");
        }
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (fields[i] != columns[i]) {
                throw ParseError(path_, 1, "expected column '" + columns[i] + "', got '" + fields[i] + "'");
            }
        }
        ncols_ = columns.size();
        line_ = 1;
    }

    // Reads the next data row; returns false at EOF. Blank trailing lines
    // are skipped.
    bool next(std::vector<std::string>& row) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            row = split(line);
            if (row.size() != ncols_) {
                throw ParseError(path_, line_, "expected " + std::to_string(ncols_) + " fields, got " +
                                                   std::to_string(row.size()));
            }
            return true;
        }
        return false;
    }

    long line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t ncols_ = 0;
    long line_ = 0;
};

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& columns) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open " + path + " for writing");
        write_row(columns);
    }

    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace examgen::csv
