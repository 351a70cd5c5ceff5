#pragma once

// Gamma and two-parameter Mittag-Leffler functions.

#include <complex>

namespace fde {

/// Γ(x). Throws DomainError at the poles x ∈ {0, -1, -2, ...} and on overflow.
double gamma(double x);

/// 1/Γ(x), which is entire: returns 0 at the poles instead of throwing.
double rgamma(double x);

/// Γ(x)/Γ(y) without intermediate overflow for large arguments. `x` must not
/// be a pole; a pole in `y` yields 0.
double gamma_ratio(double x, double y);

struct MLParams {
  double alpha = 1.0;
  double beta = 1.0;
  double z = 0.0;
};

struct MLOptions {
  /// Remainder bound: absolute for |E| <= 1, relative above.
  double tolerance = 1e-12;
  /// Convergence budget on |z|.
  double max_abs_z = 50.0;
  int max_terms = 200'000;
};

/// E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk+β) by direct summation.
///
/// Terms are formed in binary128 and accumulated with Neumaier compensation,
/// so cancellation in alternating series costs no accuracy inside the budget.
/// Summation stops once the geometric tail bound |t_{k+1}|/(1-q) is below the
/// tolerance; the bound is rigorous because the term ratio decreases
/// monotonically once αk+β > 0 (log-convexity of Γ).
///
/// Throws std::invalid_argument for alpha <= 0 and DomainError when |z|
/// exceeds the budget, the value overflows a double, or the term limit is hit.
double mittag_leffler(const MLParams& p, const MLOptions& opts = {});

std::complex<double> mittag_leffler(double alpha, double beta, std::complex<double> z, const MLOptions& opts = {});

/// x0 · E_α(λ t^α): solution of ^C D^α x = λx, x(0) = x0 for α ∈ (0, 2]
/// (with x'(0) = 0 when α > 1).
double ml_solution(double alpha, double lambda, double x0, double t);

}  // namespace fde
