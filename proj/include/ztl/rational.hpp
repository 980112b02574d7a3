#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace ztl {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "p/q", integers and finite decimals ("0.25", "-1.5e-2"). A leading
// U+2212 minus sign is treated like '-'.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

double to_double(const Rational& q);

}  // namespace ztl
