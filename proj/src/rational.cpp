#include "mapind/rational.hpp"

#include <cctype>
#include <cmath>

#include "mapind/errors.hpp"

namespace mapind {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(const std::string& text, std::size_t begin, std::size_t end) {
  std::size_t i = begin;
  bool negative = false;
  if (i < end && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  if (i == end) throw ParseError("expected digits in '" + text + "'", i);
  cpp_int v = 0;
  for (; i < end; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw ParseError("unexpected character in rational '" + text + "'", i);
    }
    v = v * 10 + (text[i] - '0');
  }
  return negative ? cpp_int(-v) : v;
}

}  // namespace

Rational::Rational(long long num, long long den) {
  if (den == 0) throw ParseError("zero denominator");
  value_ = Value(cpp_int(num), cpp_int(den));
}

Rational Rational::parse(const std::string& raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  if (b == e) throw ParseError("empty rational", b);
  const auto slash = raw.find('/', b);
  if (slash == std::string::npos || slash >= e) return Rational(Value(parse_integer(raw, b, e)));
  const cpp_int num = parse_integer(raw, b, slash);
  const cpp_int den = parse_integer(raw, slash + 1, e);
  if (den == 0) throw ParseError("zero denominator in '" + raw + "'", slash + 1);
  return Rational(Value(num, den));
}

Rational Rational::from_double(double d) {
  if (!std::isfinite(d)) throw ParseError("non-finite threshold");
  int exp = 0;
  const double mant = std::frexp(d, &exp);
  // mant * 2^53 is an exact integer for every finite double.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Value v{cpp_int(scaled)};
  if (exp > 0) {
    v *= Value(cpp_int(1) << exp);
  } else if (exp < 0) {
    v /= Value(cpp_int(1) << -exp);
  }
  return Rational(v);
}

Rational Rational::inverse_power_of_two(unsigned exponent) {
  return Rational(Value(cpp_int(1), cpp_int(1) << exponent));
}

double Rational::to_double() const { return static_cast<double>(value_); }

std::string Rational::to_string() const {
  const auto num = boost::multiprecision::numerator(value_);
  const auto den = boost::multiprecision::denominator(value_);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

bool exceeds(double p, const Rational& threshold) {
  return Rational::from_double(p).value() > threshold.value();
}

}  // namespace mapind
