#pragma once

// Fractional integrals and Caputo derivatives of sampled functions on uniform
// grids.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fde {

struct GridFunction {
  double a = 0.0;
  double h = 1.0;
  std::vector<double> values;  // values[i] = f(a + i*h)
  /// Set when values[0] was extrapolated rather than computed.
  bool origin_extrapolated = false;

  GridFunction() = default;
  /// Throws std::invalid_argument unless h > 0 and there are >= 2 values.
  GridFunction(double a, double h, std::vector<double> values);

  template <class F>
  static GridFunction sample(F&& f, double a, double h, std::size_t intervals) {
    std::vector<double> v(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) v[i] = f(a + static_cast<double>(i) * h);
    return GridFunction(a, h, std::move(v));
  }

  std::size_t size() const noexcept { return values.size(); }
  double t(std::size_t i) const noexcept { return a + static_cast<double>(i) * h; }
};

/// Product-trapezoidal J_a^α on the grid (node 0 maps to 0). O(h^2) for
/// f ∈ C^2. α = 0 returns f.
///
/// `correction_exponents` add starting weights exactly as for
/// caputo_derivative_grid. Plain trapezoid misses J^α (t-a)^{1/2} by
/// (Γ(3/2) - 1/Γ(5/2)) h at the first node.
GridFunction rl_integral_grid(const GridFunction& f, double alpha,
                              std::span<const double> correction_exponents = {});

/// L1 scheme for ^C D_a^α, 0 < α < 1, with node 0 extrapolated linearly from
/// nodes 1 and 2 (flagged in the result).
///
/// `correction_exponents` σ_1..σ_s (distinct, > 0) add starting weights on
/// f_1..f_s so that the scheme is exact on every (t-a)^{σ_i}. Non-smooth data
/// such as E_α((t-a)^α) needs them: plain L1 has an O(1) error on (t-a)^{1/2}
/// that does not shrink with h. Empty means classical L1.
GridFunction caputo_derivative_grid(const GridFunction& f, double alpha,
                                    std::span<const double> correction_exponents = {});

/// CSV with header `t,value`, 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& f);
/// Reads what write_csv writes; the grid must be uniform to 1e-9 relative.
GridFunction read_csv(std::istream& is);

}  // namespace fde
