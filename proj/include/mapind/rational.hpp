#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mapind {

// Exact threshold value for the decision variants. Probabilities stay
// doubles; comparisons convert the double exactly, so a threshold such as
// 2^-(|R|+1) or 3/16 is never rounded.
class Rational {
 public:
  using Value = boost::multiprecision::cpp_rational;

  Rational() = default;
  explicit Rational(Value v) : value_(std::move(v)) {}
  Rational(long long num, long long den);

  // "p/q" or an integer. Decimal fractions are rejected: pass them as a
  // double instead so they compare against the same binary value a
  // computed probability would have.
  static Rational parse(const std::string& text);
  // Exact value of the double.
  static Rational from_double(double d);
  // 2^-exponent
  static Rational inverse_power_of_two(unsigned exponent);

  const Value& value() const { return value_; }
  double to_double() const;
  // "p/q", or "p" when the denominator is 1.
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  Value value_{0};
};

// Strict p > threshold, evaluated exactly.
bool exceeds(double p, const Rational& threshold);

}  // namespace mapind
