#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "qoi/error.hpp"

namespace qoi {

// Shortest decimal string that round-trips to the same double. -0.0 is
// normalized to 0.0 so numerically equal vectors serialize identically.
inline std::string format_double(double value) {
    if (value == 0.0) value = 0.0;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        raise(ErrorCode::parse_error, "invalid number '" + std::string(text) + "'");
    }
    return value;
}

// ASCII-only case folding; labels in this domain are vendor ASCII strings.
inline std::string fold_case(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

inline bool contains_fold(std::string_view haystack, std::string_view needle) {
    return fold_case(haystack).find(fold_case(needle)) != std::string::npos;
}

// Minimal CSV quoting: only fields containing separators or quotes get quoted.
inline std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace qoi
