// Acceptance run: one PASS/FAIL line per criterion. With an argument N only
// criterion N runs. Exit status is the number of failed criteria.

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fde/cli.hpp"
#include "fde/gridops.hpp"
#include "fde/powcalc.hpp"
#include "fde/problem.hpp"
#include "fde/reduce.hpp"
#include "fde/solve.hpp"
#include "fde/specfun.hpp"
#include "fde/stability.hpp"

using fde::Order;
using fde::PowerSum;
using fde::Rational;

namespace {

const std::string kDir = std::string(FDE_SOURCE_DIR) + "/problems/";

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Order q(std::int64_t p, std::int64_t d = 1) { return Order(Rational(p, d)); }

Outcome example1_reduction() {
  Outcome o;
  const auto p = fde::load_problem(kDir + "ex1.json");
  const auto s = fde::reduce_to_single_term(*p.multi_term);
  o.require(s.gamma == q(1, 2), "gamma = 1/2");
  o.require(s.dimension() == 3, "N = 3");
  Eigen::MatrixXd expect(3, 3);
  expect << 0, 1, 0, 0, 0, 1, 0, 0, 1;
  o.require(s.system.linear && s.system.linear->matrix == expect, "matrix [[0,1,0],[0,0,1],[0,0,1]]");
  const auto c = fde::characteristic_polynomial(s.system.linear->matrix);
  o.require(c == std::vector<double>{1, -1, 0, 0}, "char poly coefficients exactly (1, -1, 0, 0)");
  std::ostringstream out, err;
  const int code = fde::run_cli({"reduce", kDir + "ex1.json"}, out, err);
  o.require(code == 0 && out.str().find("characteristic polynomial: lambda^3 - lambda^2\n") != std::string::npos,
            "CLI reduce prints lambda^3 - lambda^2");
  o.note("gamma=" + s.gamma.str() + " N=" + std::to_string(s.dimension()) + " poly=" + fde::polynomial_text(c));
  return o;
}

double example1_error(double h) {
  const auto p = fde::load_problem(kDir + "ex1.json");
  const auto tr = fde::solve_single_term(fde::reduce_to_single_term(*p.multi_term), 2.0, h);
  double e = 0;
  for (std::size_t i = 0; i < tr.nodes(); ++i) {
    const double t = tr.t(i);
    e = std::max(e, std::abs(tr.states(static_cast<Eigen::Index>(i), 0) - t * fde::mittag_leffler({0.5, 2, std::sqrt(t)})));
  }
  return e;
}

Outcome example1_solve() {
  Outcome o;
  const auto p = fde::load_problem(kDir + "ex1.json");
  const auto s = fde::reduce_to_single_term(*p.multi_term);
  o.require(s.system.initial == std::vector<double>{0, 0, 1}, "initial vector (0, 0, 1)");
  const double e10 = example1_error(1.0 / 1024);
  const double e11 = example1_error(1.0 / 2048);
  o.require(e10 <= 5e-3, "max error <= 5e-3 at h = 2^-10");
  o.require(e10 / e11 >= 1.8, "error ratio >= 1.8 when halving h");
  o.note("err(2^-10)=" + fmt("%.3e", e10) + " err(2^-11)=" + fmt("%.3e", e11) + " ratio=" + fmt("%.3f", e10 / e11));
  return o;
}

Outcome formulation_equivalence() {
  Outcome o;
  const auto p = fde::load_problem(kDir + "ex1.json");
  const double h = 1.0 / 1024;
  const auto single = fde::solve_single_term(fde::reduce_to_single_term(*p.multi_term), 2.0, h);
  const auto multi = fde::solve_multi_order(fde::reduce_to_multi_order(*p.multi_term), 2.0, h);
  double d = 0;
  for (Eigen::Index i = 0; i < single.states.rows(); ++i) d = std::max(d, std::abs(single.states(i, 0) - multi.states(i, 0)));
  o.require(single.nodes() == multi.nodes(), "same grid");
  o.require(d <= 1e-2, "max |x_single - x_multi| <= 1e-2");
  o.note("max difference " + fmt("%.3e", d));
  return o;
}

Outcome example2_stability() {
  Outcome o;
  const auto p = fde::load_problem(kDir + "ex2.json");
  const auto r = fde::assess_stability(*p.multi_order);
  const std::vector<std::complex<double>> expect{{-0.103917, 0}, {0.101958, 0.103850}, {0.101958, -0.103850}};
  std::vector<std::complex<double>> got;
  for (const auto& m : r.eigenvalues)
    for (int k = 0; k < m.eigenvalue.multiplicity; ++k) got.push_back(m.eigenvalue.value);
  o.require(got.size() == 3, "three eigenvalues");
  double worst = 0;
  for (const auto& e : expect) {
    double best = INFINITY;
    for (const auto& g : got) best = std::min(best, std::abs(g - e));
    worst = std::max(worst, best);
  }
  o.require(worst <= 1e-5, "eigenvalues within 1e-5 of {-0.103917, 0.101958 +- 0.103850i}");
  std::complex<double> sum = 0, prod = 1;
  for (const auto& g : got) {
    sum += g;
    prod *= g;
  }
  o.require(std::abs(sum - 0.1) <= 1e-6, "root sum 0.1 +- 1e-6");
  o.require(std::abs(prod + 0.002201) <= 1e-6, "root product -0.002201 +- 1e-6");
  o.require(r.gamma == q(1, 4), "gamma = 1/4");
  o.require(std::abs(r.threshold - std::numbers::pi / 8) <= 1e-15, "threshold pi/8");
  o.require(r.verdict == fde::StabilityVerdict::Stable, "verdict STABLE");
  o.note("max eigenvalue deviation " + fmt("%.2e", worst) + ", sum " + fmt("%.9f", sum.real()) + ", product " +
         fmt("%.9f", prod.real()) + ", verdict " + std::string(fde::to_string(r.verdict)));
  return o;
}

PowerSum random_sum(std::mt19937_64& rng, Rational lo, Rational hi, std::int64_t den, std::int64_t max_int) {
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  std::uniform_int_distribution<std::int64_t> pick((lo * Rational(den)).ceil(), (hi * Rational(den)).floor());
  std::uniform_int_distribution<int> count(1, 4);
  PowerSum f(0.0);
  const int n = count(rng);
  for (int i = 0; i < n; ++i) f.add(Order(Rational(pick(rng), den)), c(rng));
  if (max_int >= 0) f.add(Order(std::uniform_int_distribution<std::int64_t>(0, max_int)(rng)), c(rng));
  return f;
}

Outcome semigroup_suite() {
  Outcome o;
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<std::int64_t> bnum(1, 48);
  std::uniform_int_distribution<std::int64_t> gnum(1, 12);
  int holds = 0;
  int trials = 0;
  while (trials < 10000) {
    const Order beta(Rational(bnum(rng), 12));
    const Order gamma(Rational(gnum(rng), 12));
    const Order sum = beta + gamma;
    if (sum.ceil() - beta.floor() != 1 || Rational(5) < *sum.exact()) continue;
    const PowerSum f = random_sum(rng, *sum.exact(), Rational(5), 12, 5);
    const auto rep = fde::check_semigroup(f, beta, gamma, fde::SemigroupMode::Caputo);
    if (rep.hypothesis_met && rep.verdict == fde::Verdict::Holds) ++holds;
    ++trials;
  }
  o.require(holds == trials, "every hypothesis-satisfying Caputo instance returns HOLDS");
  o.note(std::to_string(holds) + "/" + std::to_string(trials) + " HOLDS");

  int cx = 0;
  int cx_ok = 0;
  for (std::int64_t b = 1; b < 60; ++b)
    for (std::int64_t g = 1; g < 12; ++g) {
      const Rational br(b, 12), gr(g, 12);
      if (br.is_integer() || (br + gr).ceil() != br.ceil() || (br + gr).is_integer()) continue;
      ++cx;
      const auto rep = fde::check_semigroup(PowerSum::monomial(0.0, Order(br)), Order(br), Order(gr),
                                            fde::SemigroupMode::Caputo);
      const PowerSum direct = PowerSum::monomial(0.0, Order(-gr), fde::gamma(br.value() + 1) / fde::gamma(1 - gr.value()));
      if (rep.verdict == fde::Verdict::Violated && rep.outer.value.empty() && rep.direct.value.approx_equal(direct))
        ++cx_ok;
    }
  o.require(cx > 0 && cx_ok == cx, "Caputo counterexample family: VIOLATED, outer = 0, direct = G(b+1)/G(1-g) t^-g");
  o.note(std::to_string(cx_ok) + "/" + std::to_string(cx) + " counterexamples");

  int rl = 0;
  int rl_ok = 0;
  for (std::int64_t c = 1; c < 12; ++c)
    for (std::int64_t b = 1; b < 48; ++b) {
      const Rational cr(c, 12), br(b, 12);
      if (!(cr < br) || (br - cr).is_integer()) continue;
      ++rl;
      const auto r = fde::rl_derivative(PowerSum::monomial(0.0, Order(cr)), Order(br));
      const auto want = br < cr + Rational(1) ? fde::Regularity::L1Only : fde::Regularity::NotL1;
      if (r.regularity.tag == want) ++rl_ok;
    }
  o.require(rl > 0 && rl_ok == rl, "RL counterexample family classified L1Only / NotL1");
  o.note(std::to_string(rl_ok) + "/" + std::to_string(rl) + " RL classifications");
  return o;
}

Outcome integral_laws() {
  Outcome o;
  std::mt19937_64 rng(314);
  std::uniform_int_distribution<std::int64_t> ord(0, 36);
  int bad_semigroup = 0;
  int bad_inverse = 0;
  for (int i = 0; i < 2000; ++i) {
    const PowerSum f = random_sum(rng, Rational(-9, 10), Rational(5), 10, 3);
    const Order a(Rational(ord(rng), 12));
    const Order b(Rational(ord(rng), 12));
    if (!fde::rl_integral(fde::rl_integral(f, a), b).approx_equal(fde::rl_integral(f, a + b))) ++bad_semigroup;
    if (!fde::rl_derivative(fde::rl_integral(f, a), a).value.approx_equal(f)) ++bad_inverse;
  }
  o.require(bad_semigroup == 0, "J^a J^b = J^(a+b) on 2000 random power sums");
  o.require(bad_inverse == 0, "D^a J^a = I on 2000 random power sums");

  double worst = 0;
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::uniform_real_distribution<double> k(0.2, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double c0 = c(rng), c1 = c(rng), c2 = c(rng), k1 = k(rng), k2 = k(rng);
    auto fn = [&](double t) { return c0 + c1 * std::sin(k1 * t) + c2 * t * std::cos(k2 * t); };
    const auto f = fde::GridFunction::sample(fn, 0.0, 1.0 / 1024, 2048);
    const auto twice = fde::rl_integral_grid(fde::rl_integral_grid(f, 0.5), 0.5);
    const auto once = fde::rl_integral_grid(f, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(twice.values[i] - once.values[i]));
  }
  o.require(worst <= 5e-4, "grid J^1/2 J^1/2 within 5e-4 of J^1 at h = 1/1024");
  o.note("grid discrepancy " + fmt("%.3e", worst));
  return o;
}

Outcome eigenfunction_law() {
  Outcome o;
  fde::MultiOrderSystem s;
  s.orders = {q(1, 2)};
  Eigen::MatrixXd A(1, 1);
  A << 1.0;
  s.linear = fde::LinearSystem{A, {}};
  s.initial = {1.0};
  s.labels = {"x1"};
  const auto tr = fde::solve_multi_order(s, 1.0, 1.0 / 1024);
  const double x1 = tr.states(tr.states.rows() - 1, 0);
  const double oracle = std::exp(1.0) * std::erfc(-1.0);
  o.require(std::abs(x1 - oracle) <= 5e-3, "x(1) within 5e-3 of e*erfc(-1)");
  o.require(std::abs(x1 - 5.00898) <= 5e-3, "x(1) = 5.00898 +- 5e-3");
  o.note("x(1)=" + fmt("%.6f", x1) + " oracle=" + fmt("%.6f", oracle));
  return o;
}

Outcome corrected_identity() {
  Outcome o;
  const double g = 0.5;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = 2.0 * i / 99.0;
    const double tg = std::pow(t, g);
    const double lhs = t * fde::mittag_leffler({g, 2, tg});
    const double rhs = fde::mittag_leffler({g, 1, tg}) - 1 - tg / fde::gamma(1 + g);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  o.require(worst <= 1e-9, "t E_{g,2}(t^g) = E_g(t^g) - 1 - t^g/G(1+g) to 1e-9 at 100 points");
  // printed variant: -1 - t^g + G(1+g) E_g(t^g), at t = 0
  const double printed = -1.0 - 0.0 + fde::gamma(1 + g) * fde::mittag_leffler({g, 1, 0.0});
  const double gap = std::abs(printed - 0.0);
  o.require(std::abs(gap - std::abs(fde::gamma(1.5) - 1)) <= 1e-15 && std::abs(gap - 0.1138) <= 1e-4,
            "printed variant misses at t = 0 by |G(3/2) - 1| = 0.1138");
  o.note("max deviation " + fmt("%.2e", worst) + ", printed variant gap at 0 = " + fmt("%.6f", gap));
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"Example 1 reduction", example1_reduction},
      {"Example 1 solve", example1_solve},
      {"formulation equivalence", formulation_equivalence},
      {"Example 2 stability", example2_stability},
      {"semigroup property suite", semigroup_suite},
      {"integral semigroup and inverse laws", integral_laws},
      {"eigenfunction law", eigenfunction_law},
      {"corrected Example 1 identity", corrected_identity},
  };
  std::size_t first = 1;
  std::size_t last = all.size();
  if (argc > 1) {
    const long n = std::strtol(argv[1], nullptr, 10);
    if (n < 1 || n > static_cast<long>(all.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], all.size());
      return 2;
    }
    first = last = static_cast<std::size_t>(n);
  }
  int failed = 0;
  for (std::size_t i = first; i <= last; ++i) {
    Outcome o;
    try {
      o = all[i - 1].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i, all[i - 1].title, o.detail.c_str());
    if (!o.pass) ++failed;
  }
  return failed;
}
