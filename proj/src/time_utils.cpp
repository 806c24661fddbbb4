#include "scem/time_utils.hpp"

#include <cmath>
#include <cstdio>
#include <regex>

#include "scem/types.hpp"

namespace scem {

namespace {

// Howard Hinnant's civil-calendar conversions.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(static_cast<long long>(yoe) + era * 400 + (m <= 2));
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

double parse_iso8601(const std::string& text) {
    static const std::regex re(R"(^\s*(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2})(?::(\d{2}(?:\.\d+)?))?(Z|[+-]00:?00)?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ConfigError("invalid ISO-8601 UTC time '" + text + "'");
    const int year = std::stoi(m[1]);
    const unsigned month = static_cast<unsigned>(std::stoi(m[2]));
    const unsigned day = static_cast<unsigned>(std::stoi(m[3]));
    const int hour = std::stoi(m[4]);
    const int minute = std::stoi(m[5]);
    const double second = m[6].matched ? std::stod(m[6]) : 0.0;
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) throw ConfigError("invalid month in '" + text + "'");
    const unsigned dim = kDays[month - 1] + (month == 2 && leap(year) ? 1 : 0);
    if (day < 1 || day > dim || hour > 23 || minute > 59 || second >= 61.0)
        throw ConfigError("invalid date/time field in '" + text + "'");
    return static_cast<double>(days_from_civil(year, month, day)) * 86400.0 + hour * 3600.0 + minute * 60.0 + second;
}

std::string format_iso8601(double epoch_seconds) {
    const auto total = static_cast<long long>(std::llround(epoch_seconds));
    long long days = total / 86400;
    long long rem = total % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y;
    unsigned mo;
    unsigned d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, mo, d, rem / 3600, (rem / 60) % 60,
                  rem % 60);
    return buf;
}

std::string file_stamp(double epoch_seconds) {
    std::string s = format_iso8601(epoch_seconds);
    for (char& c : s)
        if (c == ':') c = '-';
    return s;
}

}  // namespace scem
