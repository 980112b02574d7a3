#include "ztl/rational.hpp"

#include "ztl/error.hpp"

#include <cctype>

namespace ztl {

namespace {

[[noreturn]] void bad(std::string_view text, const char* why) {
  throw Error(ErrorKind::parse_error, "bad rational literal \"" + std::string(text) + "\": " + why);
}

boost::multiprecision::cpp_int parse_digits(std::string_view s, std::string_view whole) {
  if (s.empty()) bad(whole, "missing digits");
  boost::multiprecision::cpp_int v = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) bad(whole, "unexpected character");
    v = v * 10 + (ch - '0');
  }
  return v;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  using boost::multiprecision::cpp_int;
  long long exponent = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    std::string_view e = s.substr(epos + 1);
    bool eneg = false;
    if (!e.empty() && (e[0] == '+' || e[0] == '-')) {
      eneg = e[0] == '-';
      e.remove_prefix(1);
    }
    if (e.empty() || e.size() > 6) bad(whole, "bad exponent");
    exponent = static_cast<long long>(parse_digits(e, whole));
    if (eneg) exponent = -exponent;
    s = s.substr(0, epos);
  }
  auto dot = s.find('.');
  std::string digits(s.substr(0, dot));
  if (dot != std::string_view::npos) {
    std::string_view frac = s.substr(dot + 1);
    digits += frac;
    exponent -= static_cast<long long>(frac.size());
  }
  cpp_int num = parse_digits(digits, whole);
  cpp_int scale = 1;
  for (long long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  if (exponent >= 0) return Rational(num * scale);
  return Rational(num, scale);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool neg = false;
  if (s.starts_with("\xE2\x88\x92")) {
    neg = true;
    s.remove_prefix(3);
  } else if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) bad(text, "empty");
  Rational q;
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    auto num = parse_digits(s.substr(0, slash), text);
    auto den = parse_digits(s.substr(slash + 1), text);
    if (den == 0) bad(text, "zero denominator");
    q = Rational(num, den);
  } else {
    q = parse_decimal(s, text);
  }
  return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace ztl
