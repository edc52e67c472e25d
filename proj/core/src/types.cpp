#include "batchrisk/types.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

namespace batchrisk {

double Criterion::log10_m() const { return std::log10(m); }

std::string Criterion::str() const {
    std::ostringstream ss;
    ss << n << '/' << c << '/' << m;
    return ss.str();
}

Criterion Criterion::parse(const std::string& text) {
    const auto bad = [&text]() {
        throw std::invalid_argument("malformed criterion \"" + text +
                                    "\": expected n/c/m, e.g. 5/1/1000");
    };
    const auto s1 = text.find('/');
    const auto s2 = text.find('/', s1 == std::string::npos ? 0 : s1 + 1);
    if (s1 == std::string::npos || s2 == std::string::npos) bad();

    Criterion crit;
    const char* begin = text.data();
    auto r1 = std::from_chars(begin, begin + s1, crit.n);
    auto r2 = std::from_chars(begin + s1 + 1, begin + s2, crit.c);
    if (r1.ec != std::errc{} || r1.ptr != begin + s1 || r2.ec != std::errc{} ||
        r2.ptr != begin + s2)
        bad();
    try {
        std::size_t used = 0;
        crit.m = std::stod(text.substr(s2 + 1), &used);
        if (used != text.size() - s2 - 1) bad();
    } catch (const std::invalid_argument&) {
        bad();
    } catch (const std::out_of_range&) {
        bad();
    }
    crit.require_valid();
    return crit;
}

std::string to_string(McStatus s) {
    switch (s) {
        case McStatus::met:
            return "met";
        case McStatus::not_met:
            return "not_met";
        case McStatus::not_applied:
            return "not_applied";
    }
    return "?";
}

McStatus mc_status_from_string(const std::string& s) {
    if (s == "met") return McStatus::met;
    if (s == "not_met" || s == "not-met") return McStatus::not_met;
    if (s == "not_applied" || s == "not-applied") return McStatus::not_applied;
    throw std::invalid_argument("unknown MC status: " + s);
}

}  // namespace batchrisk
