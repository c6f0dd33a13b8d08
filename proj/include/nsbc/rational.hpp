#pragma once

#include <boost/rational.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nsbc {

// Exact probability carrier. All box/pmf probabilities in this project are
// ratios of modest integers (denominators are products of field orders), so
// a 64-bit rational never overflows in the enumerations we run.
using Rat = boost::rational<long long>;

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// log2 of a positive rational, evaluated once in double precision.
inline double log2_rat(const Rat& r) {
    if (r <= Rat(0)) throw std::domain_error("log2_rat: non-positive rational");
    return std::log2(static_cast<double>(r.numerator())) -
           std::log2(static_cast<double>(r.denominator()));
}

// Parses "3/8" or "1" (used by the tabular-box JSON loader).
inline Rat parse_rat(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    const long long num = std::stoll(s.substr(0, slash));
    const long long den = std::stoll(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
    return Rat(num, den);
}

inline std::string format_rat(const Rat& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

} // namespace nsbc
