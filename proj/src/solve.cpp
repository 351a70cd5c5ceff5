#include "fde/solve.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fde/error.hpp"
#include "fde/specfun.hpp"

namespace fde {

void Trajectory::set_meta(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata)
    if (k == key) {
      v = std::move(value);
      return;
    }
  metadata.emplace_back(key, std::move(value));
}

namespace {

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Weights {
  double pred_scale;             // h^β / Γ(β+1)
  double corr_scale;             // h^β / Γ(β+2)
  std::vector<double> pred;      // (k+1)^β - k^β
  std::vector<double> corr;      // (k+1)^{β+1} - 2k^{β+1} + (k-1)^{β+1}, corr[0] = 1
  std::vector<double> corr_f0;   // n^{β+1} - (n-β)(n+1)^β
};

Weights make_weights(double beta, double h, std::size_t steps) {
  Weights w;
  w.pred_scale = std::pow(h, beta) / gamma(beta + 1.0);
  w.corr_scale = std::pow(h, beta) / gamma(beta + 2.0);
  std::vector<double> pb(steps + 2);
  std::vector<double> pb1(steps + 2);
  for (std::size_t k = 0; k < steps + 2; ++k) {
    pb[k] = std::pow(static_cast<double>(k), beta);
    pb1[k] = std::pow(static_cast<double>(k), beta + 1.0);
  }
  w.pred.resize(steps + 1);
  w.corr.resize(steps + 1);
  w.corr_f0.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    w.pred[k] = pb[k + 1] - pb[k];
    w.corr[k] = k == 0 ? 1.0 : pb1[k + 1] - 2.0 * pb1[k] + pb1[k - 1];
    w.corr_f0[k] = pb1[k] - (static_cast<double>(k) - beta) * pb[k + 1];
  }
  return w;
}

}  // namespace

Trajectory solve_multi_order(const MultiOrderSystem& s, double t_end, double h, int corrector_iterations) {
  s.validate();
  if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("step size must be positive");
  if (!(t_end > s.a)) throw std::invalid_argument("t_end must exceed the left end point");
  if (corrector_iterations < 0) throw std::invalid_argument("corrector iterations must be non-negative");
  const double span = t_end - s.a;
  const double steps_real = span / h;
  const double steps_round = std::round(steps_real);
  if (std::abs(steps_real - steps_round) > 1e-9 * std::max(1.0, steps_real))
    throw std::invalid_argument("step " + num17(h) + " does not divide [" + num17(s.a) + ", " + num17(t_end) + "]");
  const auto steps = static_cast<std::size_t>(steps_round);
  const std::size_t dim = s.dimension();

  std::map<double, Weights> cache;
  std::vector<const Weights*> w(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double beta = s.orders[i].value();
    auto it = cache.find(beta);
    if (it == cache.end()) it = cache.emplace(beta, make_weights(beta, h, steps)).first;
    w[i] = &it->second;
  }

  Trajectory tr;
  tr.a = s.a;
  tr.h = h;
  tr.orders = s.orders;
  tr.labels = s.labels;
  tr.states.resize(static_cast<Eigen::Index>(steps + 1), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) tr.states(0, static_cast<Eigen::Index>(i)) = s.initial[i];

  // f[i][j] = g_i(t_j, x_j); stored per component for contiguous history sums.
  std::vector<std::vector<double>> f(dim, std::vector<double>(steps + 1));
  std::vector<double> x(s.initial);
  std::vector<double> gx(dim);
  std::vector<double> xp(dim);

  auto eval_at = [&](std::size_t node, std::span<const double> state) {
    try {
      s.eval(tr.t(node), state, gx);
    } catch (const std::exception& e) {
      throw DomainError("rhs evaluation failed at node " + std::to_string(node) + " (t=" + num17(tr.t(node)) +
                        "): " + e.what());
    }
    for (std::size_t i = 0; i < dim; ++i)
      if (!std::isfinite(gx[i]))
        throw DomainError("non-finite rhs at node " + std::to_string(node) + " (t=" + num17(tr.t(node)) + ")");
  };

  eval_at(0, x);
  for (std::size_t i = 0; i < dim; ++i) f[i][0] = gx[i];

  for (std::size_t m = 0; m < steps; ++m) {
    const std::size_t n1 = m + 1;
    // Predictor: rectangle rule.
    for (std::size_t i = 0; i < dim; ++i) {
      const auto& wi = *w[i];
      const double* fi = f[i].data();
      double acc = 0.0;
      for (std::size_t j = 0; j <= m; ++j) acc += wi.pred[m - j] * fi[j];
      xp[i] = s.initial[i] + wi.pred_scale * acc;
    }
    // History part of the corrector does not change between iterations.
    std::vector<double> hist(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto& wi = *w[i];
      const double* fi = f[i].data();
      double acc = wi.corr_f0[m] * fi[0];
      for (std::size_t j = 1; j <= m; ++j) acc += wi.corr[n1 - j] * fi[j];
      hist[i] = acc;
    }
    for (int it = 0; it < corrector_iterations; ++it) {
      eval_at(n1, xp);
      for (std::size_t i = 0; i < dim; ++i) xp[i] = s.initial[i] + w[i]->corr_scale * (gx[i] + hist[i]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (!std::isfinite(xp[i]))
        throw DomainError("non-finite state at node " + std::to_string(n1) + " (t=" + num17(tr.t(n1)) + ")");
      tr.states(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(i)) = xp[i];
    }
    eval_at(n1, xp);
    for (std::size_t i = 0; i < dim; ++i) f[i][n1] = gx[i];
  }

  tr.set_meta("scheme", "fractional Adams-Bashforth-Moulton predictor-corrector");
  tr.set_meta("corrector_iterations", std::to_string(corrector_iterations));
  tr.set_meta("h", num17(h));
  std::string ord;
  for (std::size_t i = 0; i < dim; ++i) ord += (i ? " " : "") + s.orders[i].str();
  tr.set_meta("orders", ord);
  return tr;
}

Trajectory solve_single_term(const SingleTermSystem& s, double t_end, double h, int corrector_iterations) {
  Trajectory tr = solve_multi_order(s.system, t_end, h, corrector_iterations);
  tr.set_meta("reduction", "single-term chain, gamma=" + s.gamma.str() + ", N=" + std::to_string(s.dimension()));
  return tr;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd solve_linear_closed_form(double gamma_order, const Eigen::MatrixXd& A, const Eigen::VectorXd& x0,
                                         double t) {
  if (!(gamma_order > 0 && gamma_order <= 1)) throw std::invalid_argument("closed form needs gamma in (0, 1]");
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix must be square");
  if (x0.size() != A.rows()) throw std::invalid_argument("initial vector size must match the matrix");
  if (!(t >= 0)) throw std::invalid_argument("t must be non-negative");
  if (t == 0) return x0;
  const Eigen::Index n = A.rows();
  using CMat = Eigen::MatrixXcd;
  using CVec = Eigen::VectorXcd;

  const Eigen::ComplexEigenSolver<CMat> es(A.cast<std::complex<double>>());
  if (es.info() != Eigen::Success) throw DomainError("eigen-decomposition failed");
  const CVec lam = es.eigenvalues();

  // Cluster eigenvalues and take the kernel of (A - μI) per cluster.
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<std::complex<double>> mu;
  std::vector<CVec> basis;
  const double anorm = std::max(1.0, A.norm());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    std::complex<double> centre = 0.0;
    std::vector<Eigen::Index> members;
    for (Eigen::Index j = i; j < n; ++j)
      if (!used[static_cast<std::size_t>(j)] && std::abs(lam(j) - lam(i)) <= 1e-6 * anorm) {
        used[static_cast<std::size_t>(j)] = true;
        members.push_back(j);
        centre += lam(j);
      }
    centre /= static_cast<double>(members.size());
    const CMat shifted = A.cast<std::complex<double>>() - centre * CMat::Identity(n, n);
    const Eigen::JacobiSVD<CMat> svd(shifted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index kdim = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (sv(j) <= 1e-7 * anorm) ++kdim;
    kdim = std::clamp<Eigen::Index>(kdim, 1, static_cast<Eigen::Index>(members.size()));
    for (Eigen::Index j = 0; j < kdim; ++j) {
      basis.push_back(svd.matrixV().col(n - 1 - j));
      mu.push_back(centre);
    }
  }

  const auto cols = static_cast<Eigen::Index>(basis.size());
  CMat W(n, cols);
  for (Eigen::Index j = 0; j < cols; ++j) W.col(j) = basis[static_cast<std::size_t>(j)];
  const Eigen::JacobiSVD<CMat> wsvd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& wsv = wsvd.singularValues();
  const double cond = wsv(0) / wsv(cols - 1);
  if (!(cond <= 1e8))
    throw DomainError("eigenvector basis is ill-conditioned (cond " + num17(cond) + "); use the numerical solver");
  const CVec xc = x0.cast<std::complex<double>>();
  const CVec c = wsvd.solve(xc);
  if ((W * c - xc).norm() > 1e-10 * std::max(1.0, x0.norm()))
    throw DomainError("matrix is defective and the initial vector is not in the span of its eigenvectors");

  const double tg = std::pow(t, gamma_order);
  CVec x = CVec::Zero(n);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (c(j) == std::complex<double>(0.0)) continue;
    x += c(j) * mittag_leffler(gamma_order, 1.0, mu[static_cast<std::size_t>(j)] * tg) * W.col(j);
  }
  return x.real();
}

void write_csv(std::ostream& os, const Trajectory& tr) {
  for (const auto& [k, v] : tr.metadata) os << "# " << k << ": " << v << "\n";
  if (!tr.labels.empty()) {
    os << "# labels:";
    for (std::size_t i = 0; i < tr.labels.size(); ++i) os << (i ? ", " : " ") << "x" << i + 1 << " = " << tr.labels[i];
    os << "\n";
  }
  os << "t";
  const auto dim = static_cast<std::size_t>(tr.states.cols());
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i + 1;
  os << "\n";
  for (std::size_t r = 0; r < tr.nodes(); ++r) {
    os << num17(tr.t(r));
    for (std::size_t i = 0; i < dim; ++i)
      os << "," << num17(tr.states(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)));
    os << "\n";
  }
}

}  // namespace fde
