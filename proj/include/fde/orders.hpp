#pragma once

// Exact rational arithmetic for differentiation orders and power exponents.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace fde {

inline constexpr std::int64_t kDefaultMaxDenominator = 1'000'000;

/// Reduced fraction num/den with den >= 1. All arithmetic is overflow-checked
/// and throws std::overflow_error rather than wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  bool is_integer() const noexcept { return den_ == 1; }
  std::int64_t floor() const noexcept;
  std::int64_t ceil() const noexcept;

  /// "p" for integers, "p/q" otherwise.
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A real number that stays exact while everything that produced it was
/// rational. Orders read from problem files and exponents of power sums are
/// carried this way so integer tests and pole detection are exact; opaque
/// reals (e.g. irrational orders) fall back to a 1e-12 tolerance.
class Order {
 public:
  static constexpr double kTolerance = 1e-12;

  Order() : exact_(Rational{}), value_(0.0) {}
  Order(Rational r) : exact_(r), value_(r.value()) {}  // NOLINT: implicit by intent
  Order(std::int64_t n) : Order(Rational{n}) {}        // NOLINT
  Order(int n) : Order(Rational{n}) {}                 // NOLINT

  /// Opaque real; never treated as rational.
  static Order real(double v);

  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::optional<Rational>& exact() const noexcept { return exact_; }
  double value() const noexcept { return value_; }

  bool is_integer() const noexcept;
  /// Nearest integer; meaningful when is_integer().
  std::int64_t as_integer() const noexcept;
  std::int64_t floor() const noexcept;
  std::int64_t ceil() const noexcept;

  /// Exact text "p/q" when exact, otherwise %.17g.
  std::string str() const;

  friend Order operator+(const Order& a, const Order& b);
  friend Order operator-(const Order& a, const Order& b);
  Order operator-() const;

  /// Exact equality for exact operands, |a-b| <= kTolerance otherwise.
  friend bool operator==(const Order& a, const Order& b);
  friend bool operator<(const Order& a, const Order& b) { return !(a == b) && a.value_ < b.value_; }
  friend bool operator>(const Order& a, const Order& b) { return b < a; }
  friend bool operator<=(const Order& a, const Order& b) { return !(b < a); }
  friend bool operator>=(const Order& a, const Order& b) { return !(a < b); }

 private:
  std::optional<Rational> exact_;
  double value_;
};

/// Parses "p/q" or a finite decimal ("1.5", "-0.25") into an exact fraction.
/// Decimals are converted from their literal text, never through a binary
/// double. Throws ParseError on malformed text and std::invalid_argument when
/// the reduced denominator exceeds `max_denominator`.
Rational parse_rational(std::string_view text, std::int64_t max_denominator = kDefaultMaxDenominator);

/// parse_rational restricted to non-negative values.
Rational parse_order(std::string_view text, std::int64_t max_denominator = kDefaultMaxDenominator);

/// (ceil, floor) of a non-negative order.
std::pair<std::int64_t, std::int64_t> ceil_floor(const Rational& order);

/// Least common multiple of all denominators. Throws on an empty sequence.
std::int64_t lcm_denominators(std::span<const Rational> orders);

/// Largest g such that every order is an integer multiple of g. For rationals
/// this is gcd(numerators) / lcm(denominators) after bringing them to a common
/// denominator. For Orders: all exact -> the rational result; a single opaque
/// order -> itself; otherwise absent, since no rational grid can be certified.
std::optional<Rational> is_commensurate(std::span<const Rational> orders);
std::optional<Order> is_commensurate(std::span<const Order> orders);

}  // namespace fde
