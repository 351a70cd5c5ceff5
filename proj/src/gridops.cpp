#include "fde/gridops.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fde/specfun.hpp"

namespace fde {

GridFunction::GridFunction(double a_, double h_, std::vector<double> v) : a(a_), h(h_), values(std::move(v)) {
  if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("grid step must be positive");
  if (values.size() < 2) throw std::invalid_argument("grid function needs at least 2 points");
}

namespace {

void check_corrections(std::span<const double> corr, std::size_t n_pts) {
  if (corr.size() + 1 > n_pts) throw std::invalid_argument("grid too short for the requested starting corrections");
  for (std::size_t i = 0; i < corr.size(); ++i) {
    if (!(corr[i] > 0)) throw std::invalid_argument("correction exponents must be positive");
    for (std::size_t k = 0; k < i; ++k)
      if (corr[k] == corr[i]) throw std::invalid_argument("correction exponents must be distinct");
  }
}

// Starting weights w on f_1..f_m - f_0 at every node n >= 1 such that
// scheme(k^σ_i)(n) + w·(k^σ_i) = exact_i(n). `scheme` works in index units.
template <class Scheme, class Exact>
void add_starting_weights(GridFunction& r, const GridFunction& f, std::span<const double> corr, double scale,
                          Scheme&& scheme, Exact&& exact) {
  const std::size_t m = corr.size();
  const std::size_t n_pts = f.size();
  if (m == 0) return;
  Eigen::MatrixXd V(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) V(i, k) = std::pow(static_cast<double>(k + 1), corr[i]);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(V);

  std::vector<std::vector<double>> probe(m, std::vector<double>(n_pts));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n_pts; ++k) probe[i][k] = std::pow(static_cast<double>(k), corr[i]);
  Eigen::VectorXd df(m);
  for (std::size_t k = 0; k < m; ++k) df(k) = f.values[k + 1] - f.values[0];

  Eigen::VectorXd rhs(m);
  for (std::size_t n = 1; n < n_pts; ++n) {
    for (std::size_t i = 0; i < m; ++i) rhs(i) = exact(i, static_cast<double>(n)) - scheme(probe[i], n);
    const Eigen::VectorXd w = lu.solve(rhs);
    r.values[n] += scale * w.dot(df);
  }
}

}  // namespace

GridFunction rl_integral_grid(const GridFunction& f, double alpha, std::span<const double> corr) {
  if (!(alpha >= 0)) throw std::invalid_argument("integration order must be non-negative");
  if (alpha == 0) return f;
  const std::size_t n_pts = f.size();
  check_corrections(corr, n_pts);
  const double ap1 = alpha + 1.0;

  // a_k = (k+1)^{α+1} - 2k^{α+1} + (k-1)^{α+1}, a_0 = 1
  std::vector<double> pw(n_pts + 1);
  for (std::size_t k = 0; k <= n_pts; ++k) pw[k] = std::pow(static_cast<double>(k), ap1);
  std::vector<double> w(n_pts);
  w[0] = 1.0;
  for (std::size_t k = 1; k < n_pts; ++k) w[k] = pw[k + 1] - 2.0 * pw[k] + pw[k - 1];

  const double g2 = 1.0 / gamma(alpha + 2.0);
  // trapezoid sum in index units at node n
  auto trap = [&](std::span<const double> v, std::size_t n) {
    const double nd = static_cast<double>(n);
    double s = (pw[n - 1] - (nd - 1.0 - alpha) * std::pow(nd, alpha)) * v[0];
    for (std::size_t j = 1; j <= n; ++j) s += w[n - j] * v[j];
    return g2 * s;
  };
  const double hs = std::pow(f.h, alpha);
  GridFunction r(f.a, f.h, std::vector<double>(n_pts, 0.0));
  for (std::size_t n = 1; n < n_pts; ++n) r.values[n] = hs * trap(f.values, n);

  std::vector<double> exact_coeff(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) exact_coeff[i] = gamma_ratio(corr[i] + 1.0, corr[i] + 1.0 + alpha);
  add_starting_weights(r, f, corr, hs, trap,
                       [&](std::size_t i, double n) { return exact_coeff[i] * std::pow(n, corr[i] + alpha); });
  return r;
}

namespace {

// L1 sum in index units (h = 1) at node n.
double l1_node(std::span<const double> b, std::span<const double> v, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += b[j] * (v[n - j] - v[n - j - 1]);
  return s;
}

}  // namespace

GridFunction caputo_derivative_grid(const GridFunction& f, double alpha, std::span<const double> corr) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("grid Caputo derivative needs 0 < alpha < 1");
  const std::size_t n_pts = f.size();
  check_corrections(corr, n_pts);

  std::vector<double> b(n_pts);
  for (std::size_t j = 0; j < n_pts; ++j) {
    const double jd = static_cast<double>(j);
    b[j] = std::pow(jd + 1.0, 1.0 - alpha) - std::pow(jd, 1.0 - alpha);
  }
  const double g2 = 1.0 / gamma(2.0 - alpha);
  const double hs = std::pow(f.h, -alpha);

  GridFunction r(f.a, f.h, std::vector<double>(n_pts, 0.0));
  for (std::size_t n = 1; n < n_pts; ++n) r.values[n] = hs * g2 * l1_node(b, f.values, n);

  std::vector<double> exact_coeff(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) exact_coeff[i] = gamma_ratio(corr[i] + 1.0, corr[i] + 1.0 - alpha);
  add_starting_weights(
      r, f, corr, hs, [&](std::span<const double> v, std::size_t n) { return g2 * l1_node(b, v, n); },
      [&](std::size_t i, double n) { return exact_coeff[i] * std::pow(n, corr[i] - alpha); });

  r.values[0] = n_pts >= 3 ? 2.0 * r.values[1] - r.values[2] : r.values[1];
  r.origin_extrapolated = true;
  return r;
}

void write_csv(std::ostream& os, const GridFunction& f) {
  os << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.t(i), f.values[i]);
    os << buf;
  }
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty grid CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value") throw std::invalid_argument("grid CSV header must be 't,value'");
  std::vector<double> ts;
  std::vector<double> vs;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("grid CSV row " + std::to_string(row) + ": expected 2 fields");
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      ts.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument("trailing text");
      vs.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument("trailing text");
    } catch (const std::logic_error&) {
      throw std::invalid_argument("grid CSV row " + std::to_string(row) + ": malformed number");
    }
  }
  if (ts.size() < 2) throw std::invalid_argument("grid CSV needs at least 2 rows");
  const double a = ts.front();
  const double h = (ts.back() - a) / static_cast<double>(ts.size() - 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double expect = a + static_cast<double>(i) * h;
    if (std::abs(ts[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw std::invalid_argument("grid CSV is not uniform at row " + std::to_string(i + 2));
  }
  return GridFunction(a, h, std::move(vs));
}

}  // namespace fde
