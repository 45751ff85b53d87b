#include "flab/date.hpp"

#include <cstdio>
#include <stdexcept>

namespace flab {

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int parse_digits(std::string_view s, const char* what) {
    int value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') {
            throw std::invalid_argument(std::string("invalid ") + what + " in date");
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

int days_in_month(int year, int month) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return lengths[month - 1];
}

Date Date::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw std::invalid_argument("date must be YYYY-MM-DD, got '" + std::string(iso) + "'");
    }
    Date d;
    d.year = parse_digits(iso.substr(0, 4), "year");
    d.month = parse_digits(iso.substr(5, 2), "month");
    d.day = parse_digits(iso.substr(8, 2), "day");
    if (d.month < 1 || d.month > 12) {
        throw std::invalid_argument("month out of range in '" + std::string(iso) + "'");
    }
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) {
        throw std::invalid_argument("day out of range in '" + std::string(iso) + "'");
    }
    return d;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

}  // namespace flab
