// Copyright 2026 The randdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "randdd/model.hpp"

namespace randdd::csv {

inline constexpr int kSignificantDigits = 12;

/// Locale-independent shortest general form with 12 significant digits.
inline std::string format(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, kSignificantDigits);
    if (ec != std::errc{}) throw Error("csv: cannot format number");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error("csv: cannot parse number '" + std::string(s) + "'");
    }
    return x;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

/// Accumulates rows in memory; output is '\n'-terminated with no trailing spaces.
class Writer {
   public:
    explicit Writer(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) text_ += ',';
            text_ += h;
            first = false;
        }
        text_ += '\n';
    }

    Writer& cell(double x) { return raw(format(x)); }
    Writer& cell(std::string_view s) { return raw(s); }
    Writer& cell(const char* s) { return raw(s); }
    Writer& cell(bool b) { return raw(b ? "1" : "0"); }
    Writer& cell(std::size_t n) { return raw(std::to_string(n)); }

    void end_row() {
        text_ += '\n';
        row_open_ = false;
    }

    const std::string& str() const { return text_; }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open '" + path + "' for writing");
        f << text_;
        if (!f) throw Error("write failed for '" + path + "'");
    }

   private:
    Writer& raw(std::string_view s) {
        if (row_open_) text_ += ',';
        text_ += s;
        row_open_ = true;
        return *this;
    }

    std::string text_;
    bool row_open_ = false;
};

}  // namespace randdd::csv
