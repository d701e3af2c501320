#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace sle {

// Exact rational arithmetic for weight tables and exponent identities.
// Everything fed through here is a small fraction (kappa = p/q and linear
// combinations thereof), so int64 components are far from overflow.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
    return Rational(a.num * b.den, a.den * b.num);
  }
  Rational operator-() const { return Rational(-num, den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }
};

// Recognize a double as a small rational via continued fractions. Returns
// nullopt when no denominator <= max_den reproduces x to the tolerance.
inline std::optional<Rational> rational_from_double(double x, long long max_den = 1000000,
                                                    double tol = 1e-12) {
  if (!std::isfinite(x)) return std::nullopt;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(r);
    if (fl > 9e15 || fl < -9e15) return std::nullopt;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) return Rational(p1, q1);
    double frac = r - fl;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace sle
