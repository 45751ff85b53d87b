#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace flab::detail {

/// Shortest decimal text that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;  // a 32-byte buffer always fits the shortest form
    return std::string(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto start = s.find_first_not_of(ws);
    if (start == std::string_view::npos) return {};
    auto end = s.find_last_not_of(ws);
    return s.substr(start, end - start + 1);
}

/// Split on a delimiter, keeping empty fields ("a,,b," -> 4 tokens).
inline std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> tokens;
    std::string_view::size_type start = 0;
    while (true) {
        auto end = s.find(delim, start);
        if (end == std::string_view::npos) {
            tokens.push_back(s.substr(start));
            break;
        }
        tokens.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

}  // namespace flab::detail
