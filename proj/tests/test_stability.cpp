#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fde/reduce.hpp"
#include "fde/stability.hpp"

using fde::Order;
using fde::Rational;

namespace {

Order q(std::int64_t p, std::int64_t d = 1) { return Order(Rational(p, d)); }

Eigen::MatrixXd ex1_matrix() {
  Eigen::MatrixXd A(3, 3);
  A << 0, 1, 0, 0, 0, 1, 0, 0, 1;
  return A;
}

Eigen::MatrixXd ex2_star() {
  Eigen::MatrixXd A(3, 3);
  A << 0, 1, 0, 0.00001, 0, 1, -0.0022, 0, 0.1;
  return A;
}

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z) {
  std::complex<double> s = 0;
  for (double x : c) s = s * z + x;
  return s;
}

std::vector<std::complex<double>> flat(const std::vector<fde::Eigenvalue>& ev) {
  std::vector<std::complex<double>> out;
  for (const auto& e : ev)
    for (int k = 0; k < e.multiplicity; ++k) out.push_back(e.value);
  return out;
}

// Greedy matching distance between two root multisets.
double match_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0;
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const auto& u, const auto& v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("characteristic polynomials of the examples") {
  CHECK(fde::characteristic_polynomial(ex1_matrix()) == std::vector<double>{1, -1, 0, 0});
  const auto c = fde::characteristic_polynomial(ex2_star());
  REQUIRE(c.size() == 4);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(c[2] == doctest::Approx(-0.00001).epsilon(1e-12));
  CHECK(c[3] == doctest::Approx(0.002201).epsilon(1e-12));
}

TEST_CASE("characteristic polynomial of a companion matrix recovers its coefficients") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 1; n <= 8; ++n) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    c[0] = 1;
    for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(i)] = u(rng);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) C(i + 1, i) = 1;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -c[static_cast<std::size_t>(n - i)];
    const auto got = fde::characteristic_polynomial(C);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(got[i] == doctest::Approx(c[i]).epsilon(1e-10).scale(1));
  }
  CHECK_THROWS_AS(fde::characteristic_polynomial(Eigen::MatrixXd::Identity(51, 51)), std::invalid_argument);
}

TEST_CASE("eigenvalues of Example 1: 0 twice and 1") {
  const auto ev = fde::eigenvalues(ex1_matrix());
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].value == std::complex<double>(0, 0));
  CHECK(ev[0].multiplicity == 2);
  CHECK(std::abs(ev[1].value - 1.0) <= 1e-14);
  CHECK(ev[1].multiplicity == 1);
}

TEST_CASE("eigenvalues of Example 2") {
  const auto ev = flat(fde::eigenvalues(ex2_star()));
  REQUIRE(ev.size() == 3);
  const std::vector<std::complex<double>> expect{
      {-0.103917, 0}, {0.101958, 0.103850}, {0.101958, -0.103850}};
  CHECK(match_distance(ev, expect) <= 1e-5);
  // high-precision oracle
  const std::vector<std::complex<double>> mp{{-0.103916847963848, 0},
                                             {0.101958423981924, 0.103850256938770},
                                             {0.101958423981924, -0.103850256938770}};
  CHECK(match_distance(ev, mp) <= 1e-12);
  std::complex<double> sum = 0, prod = 1;
  for (const auto& z : ev) {
    sum += z;
    prod *= z;
  }
  CHECK(std::abs(sum - 0.1) <= 1e-6);
  CHECK(std::abs(prod + 0.002201) <= 1e-6);
}

TEST_CASE("residual bound |p(lambda)| <= 1e-6 (1 + ||A||^n)") {
  for (const auto& A : {ex1_matrix(), ex2_star()}) {
    const auto c = fde::characteristic_polynomial(A);
    const double bound = 1e-6 * (1 + std::pow(A.norm(), static_cast<double>(A.rows())));
    for (const auto& e : fde::eigenvalues(A)) CHECK(std::abs(horner(c, e.value)) <= bound);
  }
}

TEST_CASE("polynomial_roots on known polynomials") {
  // (x-1)^2 (x+2) x^2
  const std::vector<double> c{1, 0, -3, 2, 0, 0};
  const auto r = fde::polynomial_roots(c);
  REQUIRE(r.size() == 3);
  CHECK(std::abs(r[0].value + 2.0) <= 1e-12);
  CHECK(r[1].value == std::complex<double>(0, 0));
  CHECK(r[1].multiplicity == 2);
  CHECK(std::abs(r[2].value - 1.0) <= 1e-12);
  CHECK(r[2].multiplicity == 2);
  // x^2 + 1
  const auto i = fde::polynomial_roots(std::vector<double>{1, 0, 1});
  REQUIRE(i.size() == 2);
  CHECK(std::abs(i[0].value - std::complex<double>(0, -1)) <= 1e-14);
  CHECK(std::abs(i[1].value - std::complex<double>(0, 1)) <= 1e-14);
  CHECK_THROWS_AS(fde::polynomial_roots(std::vector<double>{0, 1, 1}), std::invalid_argument);
}

TEST_CASE("property: eigenvalues match Eigen and are similarity invariant") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S(i, j) = u(rng);
    S += 3.0 * Eigen::MatrixXd::Identity(n, n);  // well conditioned
    const Eigen::MatrixXd B = S * A * S.inverse();
    const auto ea = flat(fde::eigenvalues(A));
    const auto eb = flat(fde::eigenvalues(B));
    Eigen::ComplexEigenSolver<Eigen::MatrixXd> ref(A);
    std::vector<std::complex<double>> er(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
    CHECK(match_distance(ea, er) <= 1e-7);
    CHECK(match_distance(ea, eb) <= 1e-7);
  }
}

TEST_CASE("property: scaling by c > 0 keeps every |arg| and the verdict") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd A(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
    const double c = scale(rng);
    const auto r1 = fde::assess_stability(q(1, 2), A);
    const auto r2 = fde::assess_stability(q(1, 2), c * A);
    CHECK(r1.verdict == r2.verdict);
    std::vector<double> a1, a2;
    for (const auto& m : r1.eigenvalues) a1.push_back(m.abs_arg);
    for (const auto& m : r2.eigenvalues) a2.push_back(m.abs_arg);
    std::sort(a1.begin(), a1.end());
    std::sort(a2.begin(), a2.end());
    REQUIRE(a1.size() == a2.size());
    for (std::size_t i = 0; i < a1.size(); ++i) CHECK(a1[i] == doctest::Approx(a2[i]).epsilon(1e-8));
  }
}

TEST_CASE("verdicts") {
  auto r = fde::assess_stability(q(1, 2), ex1_matrix());
  CHECK(r.verdict == fde::StabilityVerdict::Unstable);
  CHECK(r.threshold == doctest::Approx(std::numbers::pi / 4));

  r = fde::assess_stability(q(1, 4), ex2_star());
  CHECK(r.verdict == fde::StabilityVerdict::Stable);
  CHECK(r.threshold == doctest::Approx(std::numbers::pi / 8).epsilon(1e-15));
  for (const auto& m : r.eigenvalues) {
    if (m.eigenvalue.value.imag() == 0.0)
      CHECK(m.abs_arg == doctest::Approx(std::numbers::pi));
    else
      CHECK(m.abs_arg == doctest::Approx(0.794590).epsilon(1e-6));
  }

  r = fde::assess_stability(q(1, 2), -Eigen::MatrixXd::Identity(3, 3));
  CHECK(r.verdict == fde::StabilityVerdict::Stable);

  // zero eigenvalue without an unstable one: on the boundary
  Eigen::MatrixXd Z(2, 2);
  Z << 0, 0, 0, -1;
  CHECK(fde::assess_stability(q(1, 2), Z).verdict == fde::StabilityVerdict::Marginal);

  // arg exactly at the threshold
  const double th = std::numbers::pi / 4;
  Eigen::MatrixXd R(2, 2);
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  CHECK(fde::assess_stability(q(1, 2), R).verdict == fde::StabilityVerdict::Marginal);
}

TEST_CASE("Example 2 through the multi-order system") {
  fde::MultiOrderSystem s;
  s.orders = {q(1, 2), q(1, 4)};
  Eigen::MatrixXd A(2, 2);
  A << 0.00001, 1, -0.0022, 0.1;
  s.linear = fde::LinearSystem{A, {}};
  s.initial = {1, 0};
  s.labels = {"x1", "x2"};
  const auto r = fde::assess_stability(s);
  CHECK(r.gamma == q(1, 4));
  CHECK(r.matrix == ex2_star());
  CHECK(r.verdict == fde::StabilityVerdict::Stable);
  const std::string text = fde::render(r);
  CHECK(text.rfind("STABLE gamma=1/4\n", 0) == 0);
  CHECK(text.find("threshold=0.39269908169872414") != std::string::npos);

  fde::MultiOrderSystem nl = s;
  nl.linear.reset();
  nl.rhs = [](double, std::span<const double>, std::span<double> out) { out[0] = out[1] = 0; };
  CHECK_THROWS_AS(fde::assess_stability(nl), std::invalid_argument);
}
