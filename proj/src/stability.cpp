#include "fde/stability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fde/error.hpp"

namespace fde {

using cplx = std::complex<double>;

std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix must be square");
  const auto n = static_cast<std::size_t>(A.rows());
  if (n == 0) throw std::invalid_argument("matrix must be non-empty");
  if (n > kMaxPolyDimension)
    throw std::invalid_argument("dimension " + std::to_string(n) + " exceeds the cap of " +
                                std::to_string(kMaxPolyDimension));
  const Eigen::Index d = A.rows();
  std::vector<double> c(n + 1);
  c[0] = 1.0;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 1; k <= n; ++k) {
    M = A * M;
    M.diagonal().array() += c[k - 1];
    c[k] = -(A * M).trace() / static_cast<double>(k);
  }
  return c;
}

namespace {

// p^{(deriv)}(z) by Horner on the differentiated coefficients.
cplx eval_derivative(std::span<const double> a, int deriv, cplx z) {
  const auto n = static_cast<int>(a.size()) - 1;
  cplx r = 0.0;
  for (int i = 0; i <= n - deriv; ++i) {
    double coeff = a[static_cast<std::size_t>(i)];
    const int power = n - i;
    for (int j = 0; j < deriv; ++j) coeff *= power - j;
    r = r * z + coeff;
  }
  return r;
}

std::vector<cplx> aberth(std::span<const double> a) {
  const auto n = static_cast<int>(a.size()) - 1;
  if (n == 0) return {};
  if (n == 1) return {cplx(-a[1] / a[0])};

  double radius = 0.0;
  for (int i = 1; i <= n; ++i)
    radius = std::max(radius, std::pow(std::abs(a[static_cast<std::size_t>(i)] / a[0]), 1.0 / i));
  if (radius == 0.0) radius = 1.0;
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    z[static_cast<std::size_t>(k)] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);

  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (int iter = 0; iter < 1000; ++iter) {
    bool all_done = true;
    for (int k = 0; k < n; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      if (done[ku]) continue;
      const cplx p = eval_derivative(a, 0, z[ku]);
      if (p == 0.0) {
        done[ku] = true;
        continue;
      }
      const cplx ratio = p / eval_derivative(a, 1, z[ku]);
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k && z[ku] != z[static_cast<std::size_t>(j)]) sum += 1.0 / (z[ku] - z[static_cast<std::size_t>(j)]);
      const cplx w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        done[ku] = true;
        continue;
      }
      z[ku] -= w;
      if (std::abs(w) <= 1e-15 * std::max(1.0, std::abs(z[ku])))
        done[ku] = true;
      else
        all_done = false;
    }
    if (all_done) break;
  }
  return z;
}

}  // namespace

std::vector<Eigenvalue> polynomial_roots(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs[0] == 0.0) throw std::invalid_argument("leading coefficient must be non-zero");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficients must be finite");

  // Exact zero roots first.
  std::size_t zeros = 0;
  std::size_t deg = coeffs.size() - 1;
  while (deg > 0 && coeffs[deg] == 0.0) {
    --deg;
    ++zeros;
  }
  const std::span<const double> a = coeffs.first(deg + 1);
  const std::vector<cplx> raw = aberth(a);

  // Cluster.
  double scale = 1.0;
  for (const auto& r : raw) scale = std::max(scale, std::abs(r));
  std::vector<bool> used(raw.size(), false);
  std::vector<Eigenvalue> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    cplx centre = 0.0;
    int m = 0;
    for (std::size_t j = i; j < raw.size(); ++j)
      if (!used[j] && std::abs(raw[j] - raw[i]) <= 1e-6 * scale) {
        used[j] = true;
        centre += raw[j];
        ++m;
      }
    centre /= static_cast<double>(m);
    // Newton on p^{(m-1)}, whose root at the cluster is simple.
    for (int it = 0; it < 60; ++it) {
      const cplx f = eval_derivative(a, m - 1, centre);
      const cplx df = eval_derivative(a, m, centre);
      if (f == 0.0 || df == 0.0) break;
      const cplx step = f / df;
      const cplx next = centre - step;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag()) ||
          std::abs(step) > 1e-3 * std::max(1.0, std::abs(centre)))
        break;
      centre = next;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(centre))) break;
    }
    if (std::abs(centre.imag()) <= 1e-13 * std::max(1.0, std::abs(centre))) centre.imag(0.0);
    out.push_back({centre, m});
  }

  // Residual sanity check: unconverged iteration must not pass silently.
  double coeff_norm = 0.0;
  for (double c : a) coeff_norm = std::max(coeff_norm, std::abs(c));
  for (const auto& e : out) {
    const double r = std::abs(e.value);
    double bound = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) bound = bound * std::max(1.0, r) + std::abs(a[i]);
    if (std::abs(eval_derivative(a, e.multiplicity - 1, e.value)) > 1e-6 * bound * (e.multiplicity > 1 ? 1e3 : 1.0))
      throw DomainError("root finder did not converge");
  }

  if (zeros > 0) {
    bool merged = false;
    for (auto& e : out)
      if (std::abs(e.value) <= 1e-6 * scale) {
        e.value = 0.0;
        e.multiplicity += static_cast<int>(zeros);
        merged = true;
      }
    if (!merged) out.push_back({cplx(0.0), static_cast<int>(zeros)});
  }
  std::sort(out.begin(), out.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return out;
}

std::vector<Eigenvalue> eigenvalues(const Eigen::MatrixXd& A) {
  const auto c = characteristic_polynomial(A);
  return polynomial_roots(c);
}

std::string_view to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "STABLE";
    case StabilityVerdict::Unstable: return "UNSTABLE";
    case StabilityVerdict::Marginal: return "MARGINAL";
  }
  return "?";
}

StabilityReport assess_stability(const Order& gamma, const Eigen::MatrixXd& A, double band) {
  if (!(gamma > Order(0)) || gamma > Order(1)) throw std::invalid_argument("base order must lie in (0, 1]");
  StabilityReport r;
  r.gamma = gamma;
  r.matrix = A;
  r.band = band;
  r.char_poly = characteristic_polynomial(A);
  r.threshold = gamma.value() * std::numbers::pi / 2.0;
  const double zero_tol = 1e-9 * std::max(1.0, A.norm());

  bool inside = false;
  bool boundary = false;
  for (const auto& e : polynomial_roots(r.char_poly)) {
    EigenvalueMargin m;
    m.eigenvalue = e;
    m.zero = std::abs(e.value) <= zero_tol;
    m.abs_arg = m.zero ? 0.0 : std::abs(std::arg(e.value));
    m.margin = m.abs_arg - r.threshold;
    if (m.zero || std::abs(m.margin) <= band)
      boundary = true;
    else if (m.margin < 0)
      inside = true;
    r.eigenvalues.push_back(m);
  }
  r.verdict = inside ? StabilityVerdict::Unstable : boundary ? StabilityVerdict::Marginal : StabilityVerdict::Stable;
  return r;
}

StabilityReport assess_stability(const MultiOrderSystem& s, double band) {
  if (!s.linear) throw std::invalid_argument("stability assessment needs a linear system");
  if (!s.linear->homogeneous()) throw std::invalid_argument("stability assessment needs a homogeneous system");
  const SingleTermSystem st = reduce_multiorder_to_single(s);
  return assess_stability(st.gamma, st.system.linear->matrix, band);
}

namespace {

// Shortest text that reads back to the same double.
std::string num_text(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string render(const StabilityReport& r) {
  std::ostringstream os;
  os << to_string(r.verdict) << " gamma=" << r.gamma.str() << "\n";
  os << "verdict=" << to_string(r.verdict) << "\n";
  os << "gamma=" << r.gamma.str() << "\n";
  os << "threshold=" << num_text(r.threshold) << "\n";
  os << "band=" << num_text(r.band) << "\n";
  os << "dimension=" << r.matrix.rows() << "\n";
  for (Eigen::Index i = 0; i < r.matrix.rows(); ++i) {
    os << "matrix[" << i + 1 << "]=";
    for (Eigen::Index j = 0; j < r.matrix.cols(); ++j) os << (j ? " " : "") << num_text(r.matrix(i, j));
    os << "\n";
  }
  os << "char_poly=";
  for (std::size_t i = 0; i < r.char_poly.size(); ++i) os << (i ? " " : "") << num_text(r.char_poly[i]);
  os << "\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const auto& e = r.eigenvalues[i];
    os << "eigenvalue[" << i + 1 << "]=" << num_text(e.eigenvalue.value.real()) << " " << num_text(e.eigenvalue.value.imag())
       << " multiplicity=" << e.eigenvalue.multiplicity << " abs_arg=" << num_text(e.abs_arg)
       << " margin=" << num_text(e.margin) << (e.zero ? " zero" : "") << "\n";
  }
  return os.str();
}

}  // namespace fde
