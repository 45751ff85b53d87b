#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace flab {

/// Calendar date without time zone. Ordering is plain (year, month, day).
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    /// Parse a strict ISO-8601 `YYYY-MM-DD` string.
    /// Throws std::invalid_argument on malformed input or impossible dates.
    static Date parse(std::string_view iso);

    /// Format as `YYYY-MM-DD`.
    std::string to_string() const;
};

/// Number of days in a month, accounting for leap years.
int days_in_month(int year, int month);

}  // namespace flab
