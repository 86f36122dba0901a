#include "rshock/common.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace rshock {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
    if (from + count > s.size()) return false;
    for (std::size_t i = from; i < from + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace

Date parse_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !all_digits(text, 0, 4) || !all_digits(text, 5, 2) || !all_digits(text, 8, 2)) {
        throw ParseError("bad date '" + text + "': expected YYYY-MM-DD");
    }
    const int y = std::atoi(text.substr(0, 4).c_str());
    const unsigned m = static_cast<unsigned>(std::atoi(text.substr(5, 2).c_str()));
    const unsigned d = static_cast<unsigned>(std::atoi(text.substr(8, 2).c_str()));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw ParseError("bad date '" + text + "': no such calendar day");
    }
    return std::chrono::sys_days{ymd};
}

std::string format_date(Date day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_double(double value) {
    if (value == 0.0) return "0";  // normalize -0
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

}  // namespace rshock
