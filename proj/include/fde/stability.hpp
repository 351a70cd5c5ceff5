#pragma once

// Sector-condition stability of linear commensurate fractional systems.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fde/orders.hpp"
#include "fde/reduce.hpp"

namespace fde {

inline constexpr std::size_t kMaxPolyDimension = 50;

/// Monic characteristic polynomial det(λI - A), coefficients in descending
/// powers (size n+1), by the Faddeev-LeVerrier recurrence.
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& A);

struct Eigenvalue {
  std::complex<double> value;
  int multiplicity = 1;
};

/// Roots of a polynomial given in descending powers (leading coefficient
/// non-zero). Ehrlich-Aberth iteration, roots within 1e-6 clustered as one
/// multiple root and polished by Newton on the (m-1)-th derivative.
/// Sorted by real part, then imaginary part.
std::vector<Eigenvalue> polynomial_roots(std::span<const double> coeffs);

/// polynomial_roots(characteristic_polynomial(A)).
std::vector<Eigenvalue> eigenvalues(const Eigen::MatrixXd& A);

enum class StabilityVerdict { Stable, Unstable, Marginal };

std::string_view to_string(StabilityVerdict v);

struct EigenvalueMargin {
  Eigenvalue eigenvalue;
  double abs_arg = 0.0;  // |arg λ|; 0 for λ = 0
  double margin = 0.0;   // |arg λ| - γπ/2
  bool zero = false;
};

struct StabilityReport {
  Order gamma;
  Eigen::MatrixXd matrix;
  std::vector<double> char_poly;
  std::vector<EigenvalueMargin> eigenvalues;
  double threshold = 0.0;  // γπ/2
  double band = 1e-6;
  StabilityVerdict verdict = StabilityVerdict::Marginal;
};

/// Stable iff every eigenvalue has |arg λ| > γπ/2 + band and none is zero.
/// Unstable if some eigenvalue has |arg λ| < γπ/2 - band. Otherwise
/// Marginal: an eigenvalue sits in the boundary band or at 0.
StabilityReport assess_stability(const Order& gamma, const Eigen::MatrixXd& A, double band = 1e-6);

/// Rewrites a homogeneous linear commensurate system to single order first.
/// Throws std::invalid_argument for nonlinear, forced or non-commensurate
/// systems.
StabilityReport assess_stability(const MultiOrderSystem& s, double band = 1e-6);

/// First line "STABLE gamma=1/4" (or UNSTABLE / MARGINAL), followed by
/// key=value lines.
std::string render(const StabilityReport& r);

}  // namespace fde
