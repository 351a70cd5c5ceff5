#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "fde/error.hpp"
#include "fde/expr.hpp"
#include "fde/specfun.hpp"

namespace {

double ev(const std::string& src, double t = 0.0, std::vector<double> x = {}, std::vector<double> d = {}) {
  return fde::eval(*fde::parse_expression(src), fde::ExprEnv{t, x, d});
}

std::size_t error_offset(const std::string& src) {
  try {
    fde::parse_expression(src);
  } catch (const fde::ParseError& e) {
    return e.offset();
  }
  return std::string::npos;
}

// Random expression text over t, x1, x2, d1 and the function set.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t s) : rng(s) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::string number() {
    switch (pick(4)) {
      case 0: return std::to_string(pick(100));
      case 1: return std::to_string(pick(1000)) + "." + std::to_string(pick(1000));
      case 2: return std::to_string(pick(9) + 1) + "e-" + std::to_string(pick(5));
      default: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", std::uniform_real_distribution<double>(0, 10)(rng));
        return buf;
      }
    }
  }

  std::string expr(int depth) {
    if (depth <= 0 || pick(4) == 0) {
      static const char* vars[] = {"t", "x1", "x2", "d1"};
      return pick(2) ? number() : vars[pick(4)];
    }
    switch (pick(7)) {
      case 0: return expr(depth - 1) + " + " + expr(depth - 1);
      case 1: return expr(depth - 1) + "-" + expr(depth - 1);
      case 2: return expr(depth - 1) + "*" + expr(depth - 1);
      case 3: return "(" + expr(depth - 1) + ") / (" + expr(depth - 1) + ")";
      case 4: return "-" + expr(depth - 1);
      case 5: return "(" + expr(depth - 1) + ")^" + expr(depth - 1);
      default: {
        static const char* one[] = {"exp", "sin", "cos", "abs", "gamma"};
        switch (pick(3)) {
          case 0: return std::string(one[pick(5)]) + "(" + expr(depth - 1) + ")";
          case 1: return "pow(" + expr(depth - 1) + ", " + expr(depth - 1) + ")";
          default: return "mlf(" + expr(depth - 1) + "," + expr(depth - 1) + "," + expr(depth - 1) + ")";
        }
      }
    }
  }
};

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(ev("2^3^2") == 512.0);
  CHECK(ev("-2^2") == -4.0);
  CHECK(ev("(-2)^2") == 4.0);
  CHECK(ev("2^-1") == 0.5);
  CHECK(ev("1 - 2 - 3") == -4.0);
  CHECK(ev("8 / 4 / 2") == 1.0);
  CHECK(ev("1 + 2 * 3") == 7.0);
  CHECK(ev("--3") == 3.0);
  CHECK(ev("+t", 2.5) == 2.5);
  CHECK(ev("2*-3") == -6.0);
}

TEST_CASE("variables and functions") {
  CHECK(ev("0.00001*x1 + x2", 0, {2.0, 3.0}) == doctest::Approx(3.00002));
  CHECK(ev("-0.0022*x1 + 0.1*x2", 0, {1.0, 1.0}) == doctest::Approx(0.0978));
  CHECK(ev("d1 + t", 1.0, {0.0}, {4.0}) == 5.0);
  CHECK(ev("gamma(5)") == doctest::Approx(24));
  CHECK(ev("exp(1)") == std::exp(1.0));
  CHECK(ev("sin(t) + cos(t)", 0.3) == std::sin(0.3) + std::cos(0.3));
  CHECK(ev("abs(-3)") == 3.0);
  CHECK(ev("pow(2, 10)") == 1024.0);
  CHECK(ev("mlf(1, 1, 1)") == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  // t E_{1/2,2}(t^{1/2}) at t = 1
  CHECK(std::abs(ev("t*mlf(0.5,2,t^0.5)", 1.0) - 2.880600913666771) <= 1e-12);
  CHECK(ev("1.5e2") == 150.0);
  CHECK(ev(".5") == 0.5);
}

TEST_CASE("syntax errors carry byte offsets") {
  CHECK(error_offset("1 +") == 3);
  CHECK(error_offset("foo(1)") == 0);
  CHECK(error_offset("x1 * y") == 5);
  CHECK(error_offset("sin(1, 2)") == 0);
  CHECK(error_offset("(1 + 2") == 6);
  CHECK(error_offset("1 2") == 2);
  CHECK(error_offset("2 3") == 2);
  CHECK(error_offset("x0") == 0);
  CHECK(error_offset("") == 0);
  CHECK(error_offset("2 $ 3") == 2);
  CHECK(error_offset("t * 3") == std::string::npos);
}

TEST_CASE("evaluation errors") {
  CHECK_THROWS_AS(ev("x3", 0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ev("d1", 0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ev("gamma(0)"), fde::DomainError);
  CHECK_THROWS_AS(ev("gamma(-2)"), fde::DomainError);
  CHECK_THROWS_AS(ev("mlf(-1, 1, 0)"), std::exception);
}

TEST_CASE("check_bindings") {
  const auto e = fde::parse_expression("x1 + 2*d2");
  CHECK_NOTHROW(fde::check_bindings(*e, 1, 2));
  try {
    fde::check_bindings(*e, 1, 1);
    FAIL("expected a ParseError");
  } catch (const fde::ParseError& err) {
    CHECK(err.offset() == 7);
  }
  CHECK_THROWS_AS(fde::check_bindings(*fde::parse_expression("x2"), 1, 0), fde::ParseError);
}

TEST_CASE("literal zero") {
  CHECK(fde::is_literal_zero(*fde::parse_expression("0")));
  CHECK(fde::is_literal_zero(*fde::parse_expression("0.0")));
  CHECK_FALSE(fde::is_literal_zero(*fde::parse_expression("0*t")));
  CHECK_FALSE(fde::is_literal_zero(*fde::parse_expression("1")));
}

TEST_CASE("property: render then parse gives the same tree") {
  Gen g(77);
  for (int i = 0; i < 10000; ++i) {
    const std::string src = g.expr(5);
    const auto e = fde::parse_expression(src);
    const std::string text = fde::render(*e);
    const auto back = fde::parse_expression(text);
    CHECK_MESSAGE(fde::same_tree(*e, *back), src << " -> " << text);
    CHECK(fde::render(*back) == text);
  }
}

TEST_CASE("property: eval is pure and bit-reproducible") {
  Gen g(79);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int compared = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto e = fde::parse_expression(g.expr(4));
    const std::vector<double> x{u(g.rng), u(g.rng)};
    const std::vector<double> d{u(g.rng)};
    const fde::ExprEnv env{u(g.rng), x, d};
    double a = 0, b = 0;
    try {
      a = fde::eval(*e, env);
    } catch (const std::exception&) {
      CHECK_THROWS(fde::eval(*e, env));
      continue;
    }
    b = fde::eval(*e, env);
    CHECK(std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b));
    ++compared;
  }
  CHECK(compared > 1000);
}
