#include "fde/orders.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fde/error.hpp"

namespace fde {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
  return r;
}

std::int64_t floor_div(std::int64_t n, std::int64_t d) {
  std::int64_t q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    if (num == std::numeric_limits<std::int64_t>::min() || den == std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("rational arithmetic overflow");
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::int64_t Rational::floor() const noexcept { return floor_div(num_, den_); }

std::int64_t Rational::ceil() const noexcept { return -floor_div(-num_, den_); }

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const std::int64_t da = a.den_ / g;
  const std::int64_t db = b.den_ / g;
  return Rational(checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)), checked_mul(a.den_, db));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  const std::int64_t n1 = g1 == 0 ? 0 : a.num_ / g1;
  const std::int64_t n2 = g2 == 0 ? 0 : b.num_ / g2;
  const std::int64_t d1 = g2 == 0 ? a.den_ : a.den_ / g2;
  const std::int64_t d2 = g1 == 0 ? b.den_ : b.den_ / g1;
  return Rational(checked_mul(n1, n2), checked_mul(d1, d2));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return a * Rational(b.den_, b.num_);
}

Rational Rational::operator-() const {
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("rational arithmetic overflow");
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------

Order Order::real(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("order must be finite");
  Order o;
  o.exact_.reset();
  o.value_ = v;
  return o;
}

bool Order::is_integer() const noexcept {
  if (exact_) return exact_->is_integer();
  return std::abs(value_ - std::round(value_)) <= kTolerance;
}

std::int64_t Order::as_integer() const noexcept {
  if (exact_) return exact_->floor();
  return static_cast<std::int64_t>(std::llround(value_));
}

std::int64_t Order::floor() const noexcept {
  if (exact_) return exact_->floor();
  if (is_integer()) return as_integer();
  return static_cast<std::int64_t>(std::floor(value_));
}

std::int64_t Order::ceil() const noexcept {
  if (exact_) return exact_->ceil();
  if (is_integer()) return as_integer();
  return static_cast<std::int64_t>(std::ceil(value_));
}

std::string Order::str() const {
  if (exact_) return exact_->str();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

Order operator+(const Order& a, const Order& b) {
  if (a.exact_ && b.exact_) return Order(*a.exact_ + *b.exact_);
  return Order::real(a.value_ + b.value_);
}

Order operator-(const Order& a, const Order& b) {
  if (a.exact_ && b.exact_) return Order(*a.exact_ - *b.exact_);
  return Order::real(a.value_ - b.value_);
}

Order Order::operator-() const {
  if (exact_) return Order(-*exact_);
  return Order::real(-value_);
}

bool operator==(const Order& a, const Order& b) {
  if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
  return std::abs(a.value_ - b.value_) <= Order::kTolerance;
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t parse_digits(std::string_view text, std::size_t begin, std::size_t end, std::size_t offset) {
  if (begin == end) throw ParseError("expected digits", offset + begin);
  std::int64_t v = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') throw ParseError(std::string("unexpected character '") + c + "'", offset + i);
    v = checked_add(checked_mul(v, 10), c - '0');
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text, std::int64_t max_denominator) {
  std::size_t lead = 0;
  while (lead < text.size() && std::isspace(static_cast<unsigned char>(text[lead]))) ++lead;
  std::size_t tail = text.size();
  while (tail > lead && std::isspace(static_cast<unsigned char>(text[tail - 1]))) --tail;
  const std::string_view body = text.substr(lead, tail - lead);
  if (body.empty()) throw ParseError("empty order literal", lead);

  std::size_t pos = 0;
  bool negative = false;
  if (body[0] == '+' || body[0] == '-') {
    negative = body[0] == '-';
    pos = 1;
  }

  Rational result;
  try {
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
      const std::int64_t p = parse_digits(body, pos, slash, lead);
      const std::int64_t q = parse_digits(body, slash + 1, body.size(), lead);
      if (q == 0) throw std::invalid_argument("order literal has zero denominator");
      result = Rational(p, q);
    } else {
      const auto dot = body.find('.');
      const std::size_t int_end = dot == std::string_view::npos ? body.size() : dot;
      if (int_end == pos && (dot == std::string_view::npos || dot + 1 == body.size()))
        throw ParseError("expected digits", lead + pos);
      std::int64_t whole = int_end == pos ? 0 : parse_digits(body, pos, int_end, lead);
      std::int64_t scale = 1;
      std::int64_t frac = 0;
      if (dot != std::string_view::npos) {
        for (std::size_t i = dot + 1; i < body.size(); ++i) {
          const char c = body[i];
          if (c < '0' || c > '9') throw ParseError(std::string("unexpected character '") + c + "'", lead + i);
          frac = checked_add(checked_mul(frac, 10), c - '0');
          scale = checked_mul(scale, 10);
        }
      }
      result = Rational(checked_add(checked_mul(whole, scale), frac), scale);
    }
  } catch (const std::overflow_error&) {
    throw ParseError("order literal too long", lead);
  }
  if (negative) result = -result;
  if (result.den() > max_denominator)
    throw std::invalid_argument("order '" + std::string(body) + "' has denominator " + std::to_string(result.den()) +
                                " above the cap of " + std::to_string(max_denominator));
  return result;
}

Rational parse_order(std::string_view text, std::int64_t max_denominator) {
  const Rational r = parse_rational(text, max_denominator);
  if (r < Rational{0}) throw std::invalid_argument("negative order '" + std::string(text) + "'");
  return r;
}

std::pair<std::int64_t, std::int64_t> ceil_floor(const Rational& order) { return {order.ceil(), order.floor()}; }

std::int64_t lcm_denominators(std::span<const Rational> orders) {
  if (orders.empty()) throw std::invalid_argument("lcm_denominators of an empty sequence");
  std::int64_t m = 1;
  for (const auto& r : orders) m = checked_mul(m / std::gcd(m, r.den()), r.den());
  return m;
}

std::optional<Rational> is_commensurate(std::span<const Rational> orders) {
  if (orders.empty()) return std::nullopt;
  for (const auto& r : orders)
    if (r.num() <= 0) return std::nullopt;
  const std::int64_t m = lcm_denominators(orders);
  std::int64_t g = 0;
  for (const auto& r : orders) g = std::gcd(g, checked_mul(r.num(), m / r.den()));
  return Rational(g, m);
}

std::optional<Order> is_commensurate(std::span<const Order> orders) {
  if (orders.empty()) return std::nullopt;
  std::vector<Rational> exact;
  exact.reserve(orders.size());
  for (const auto& o : orders) {
    if (!o.is_exact()) {
      if (orders.size() == 1 && o.value() > 0) return o;
      return std::nullopt;
    }
    exact.push_back(*o.exact());
  }
  if (auto g = is_commensurate(std::span<const Rational>(exact))) return Order(*g);
  return std::nullopt;
}

}  // namespace fde
