#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "polycsp/error.hpp"

namespace polycsp {

/// Exact rational in lowest terms with positive denominator.
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) { return r.str(); }

/// Parses "[-]digits[/digits]".
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw InvalidInput("empty rational");
  const auto slash = s.find('/');
  auto digits_ok = [](const std::string& d, bool allow_sign) {
    std::size_t i = (allow_sign && !d.empty() && d[0] == '-') ? 1 : 0;
    if (i >= d.size()) return false;
    for (; i < d.size(); ++i)
      if (d[i] < '0' || d[i] > '9') return false;
    return true;
  };
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false)) throw InvalidInput("malformed rational '" + s + "'");
  boost::multiprecision::cpp_int n(num), d(den);
  if (d == 0) throw InvalidInput("zero denominator in '" + s + "'");
  return Rational(n, d);
}

/// p + q * sqrt(2) with rational p, q.
class QuadExtNumber {
 public:
  QuadExtNumber() = default;
  QuadExtNumber(Rational p, Rational q = 0) : p_(std::move(p)), q_(std::move(q)) {}

  static QuadExtNumber sqrt2() { return {0, 1}; }

  const Rational& rational_part() const { return p_; }
  const Rational& sqrt2_part() const { return q_; }
  bool is_zero() const { return p_ == 0 && q_ == 0; }

  friend QuadExtNumber operator+(const QuadExtNumber& a, const QuadExtNumber& b) { return {a.p_ + b.p_, a.q_ + b.q_}; }
  friend QuadExtNumber operator-(const QuadExtNumber& a, const QuadExtNumber& b) { return {a.p_ - b.p_, a.q_ - b.q_}; }
  friend QuadExtNumber operator-(const QuadExtNumber& a) { return {-a.p_, -a.q_}; }
  friend QuadExtNumber operator*(const QuadExtNumber& a, const QuadExtNumber& b) {
    return {a.p_ * b.p_ + 2 * a.q_ * b.q_, a.p_ * b.q_ + a.q_ * b.p_};
  }

  /// (p - q sqrt2) / (p^2 - 2 q^2); the norm vanishes only at zero since sqrt2 is irrational.
  QuadExtNumber inverse() const {
    if (is_zero()) throw InvalidInput("division by zero in Q(sqrt2)");
    const Rational norm = p_ * p_ - 2 * q_ * q_;
    return {p_ / norm, -q_ / norm};
  }
  friend QuadExtNumber operator/(const QuadExtNumber& a, const QuadExtNumber& b) { return a * b.inverse(); }

  QuadExtNumber& operator+=(const QuadExtNumber& b) { return *this = *this + b; }

  friend bool operator==(const QuadExtNumber& a, const QuadExtNumber& b) { return a.p_ == b.p_ && a.q_ == b.q_; }

  std::string to_string() const {
    if (q_ == 0) return p_.str();
    std::string s = p_ == 0 ? "" : p_.str() + " + ";
    return s + q_.str() + "*sqrt2";
  }

 private:
  Rational p_ = 0;
  Rational q_ = 0;
};

}  // namespace polycsp
