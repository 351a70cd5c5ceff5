#pragma once

// Numerical and closed-form solution of multi-order Caputo systems.

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fde/orders.hpp"
#include "fde/reduce.hpp"

namespace fde {

struct Trajectory {
  double a = 0.0;
  double h = 0.0;
  std::vector<Order> orders;
  Eigen::MatrixXd states;  // row i = state at a + i*h; row 0 is the initial vector
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t nodes() const noexcept { return static_cast<std::size_t>(states.rows()); }
  double t(std::size_t i) const noexcept { return a + static_cast<double>(i) * h; }
  void set_meta(const std::string& key, std::string value);
};

/// Fractional Adams-Bashforth-Moulton predictor-corrector on the Volterra
/// form x_i(t) = x_i(a) + J^{β_i} g_i(t, x), each component with its own
/// kernel. Full history; weights cached per distinct order.
///
/// (t_end - a) must be an integer multiple of h (to 1e-9 relative). Throws
/// std::invalid_argument on bad arguments and DomainError when the rhs throws
/// or the state becomes non-finite; the message names the node.
Trajectory solve_multi_order(const MultiOrderSystem& s, double t_end, double h, int corrector_iterations = 1);

/// Solves the chain system and records the reduction in the metadata.
Trajectory solve_single_term(const SingleTermSystem& s, double t_end, double h, int corrector_iterations = 1);

/// x(t) = Σ_i c_i E_γ(λ_i t^γ) w_i, where the w_i are eigenvectors of A and
/// x0 = Σ c_i w_i. A may be defective as long as x0 lies in the span of its
/// eigenvectors. Throws DomainError when the eigenvector basis has condition
/// number above 1e8 or x0 is not in its span.
Eigen::VectorXd solve_linear_closed_form(double gamma, const Eigen::MatrixXd& A, const Eigen::VectorXd& x0, double t);

/// CSV: `# key: value` metadata lines (labels included), header
/// `t,x1,...,xn`, one row per node, 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& tr);

}  // namespace fde
