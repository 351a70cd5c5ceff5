#pragma once

// Reductions of multi-term Caputo equations
//   ^C D^{α_k} x = f(t, x, ^C D^{α_1} x, ..., ^C D^{α_{k-1}} x)
// to a single-order chain system or to a multi-order system, and of
// commensurate multi-order systems to a single order.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fde/orders.hpp"

namespace fde {

/// f(t, args) with args = (x, d_1, ..., d_{k-1}), d_j = ^C D^{α_j} x.
using ScalarRhs = std::function<double(double t, std::span<const double> args)>;
/// out_i = g_i(t, x).
using SystemRhs = std::function<void(double t, std::span<const double> x, std::span<double> out)>;
using Forcing = std::function<double(double t)>;

/// f = Σ coeffs[j] args[j] + forcing(t).
struct LinearForm {
  std::vector<double> coeffs;
  Forcing forcing;  // empty means 0
};

/// g(t, x) = A x + forcing(t).
struct LinearSystem {
  Eigen::MatrixXd matrix;
  std::vector<Forcing> forcing;  // empty, or one per row (empty entries mean 0)

  bool homogeneous() const;
};

struct MultiTermProblem {
  double a = 0.0;
  double b = 1.0;
  std::vector<Order> orders;  // α_1 < ... < α_k, the last one is the leading order
  ScalarRhs rhs;              // ignored when `linear` is set
  std::optional<LinearForm> linear;
  std::vector<double> initial;  // x_a^{(j)}, j = 0 .. ⌈α_k⌉-1

  std::size_t terms() const noexcept { return orders.size(); }
  double eval(double t, std::span<const double> args) const;
  /// Throws std::invalid_argument on any violated invariant other than the
  /// consecutive-gap rule, which only normalized problems must satisfy.
  void validate() const;
};

struct MultiOrderSystem {
  double a = 0.0;
  double b = 1.0;
  std::vector<Order> orders;  // β_i ∈ (0, 1]
  SystemRhs rhs;              // ignored when `linear` is set
  std::optional<LinearSystem> linear;
  std::vector<double> initial;
  std::vector<std::string> labels;

  std::size_t dimension() const noexcept { return orders.size(); }
  void eval(double t, std::span<const double> x, std::span<double> out) const;
  void validate() const;
};

/// A single-order system ^C D^γ y = g(t, y) plus the meaning of each
/// variable: y_j is ^C D^{cumulative_orders[j]} of source component
/// `source_component[j]`.
struct SingleTermSystem {
  Order gamma;
  MultiOrderSystem system;  // every order equals gamma
  std::vector<Order> cumulative_orders;
  std::vector<std::size_t> source_component;
  /// State indices passed to f, in argument order (scalar reductions only).
  std::vector<std::size_t> rhs_arguments;

  std::size_t dimension() const noexcept { return system.dimension(); }
};

inline constexpr std::size_t kMaxReducedDimension = 10'000;

/// Inserts every integer strictly between α_1 and α_k that is not already an
/// order. The rhs ignores the inserted derivatives.
MultiTermProblem normalize_orders(const MultiTermProblem& p);

/// Chain system of order γ = 1/M (M = lcm of denominators) and dimension
/// N = M α_k: ^C D^γ y_j = y_{j+1}, ^C D^γ y_{N-1} = f(t, y_0, y_{α_1/γ}, ...).
/// y_j(a) = x_a^{(jγ)} when jγ is an integer, else 0. A coarser common base
/// may be forced with `base`. Throws for irrational orders (unless k = 1 and
/// α_1 <= 1) and when N exceeds `max_dimension`.
SingleTermSystem reduce_to_single_term(const MultiTermProblem& p, std::optional<Order> base = std::nullopt,
                                       std::size_t max_dimension = kMaxReducedDimension);

/// Normalizes, then x_1 = x, x_j = ^C D^{α_{j-1}} x with orders β_1 = α_1,
/// β_j = α_j - α_{j-1}. x_1(a) = x_a^{(0)}; x_j(a) = x_a^{(α_{j-1})} when
/// α_{j-1} is an integer, else 0.
MultiOrderSystem reduce_to_multi_order(const MultiTermProblem& p);

/// Splits component i of order m_i γ into m_i chained variables of order γ.
/// The added variables start at 0.
SingleTermSystem reduce_multiorder_to_single(const MultiOrderSystem& s,
                                             std::size_t max_dimension = kMaxReducedDimension);

/// Human-readable reports (also summarize the initial-value rule).
std::string render_report(const SingleTermSystem& s);
std::string render_report(const MultiOrderSystem& s);
/// Same content as JSON text.
std::string report_json(const SingleTermSystem& s);
std::string report_json(const MultiOrderSystem& s);

}  // namespace fde
