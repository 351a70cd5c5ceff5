#pragma once

// Exact fractional calculus on power sums Σ c_i (t-a)^{p_i}.
//
// Power sums are closed under Riemann-Liouville integration and under RL and
// Caputo differentiation, which makes them the ground-truth oracle for the
// numerical modules and the carrier for the semigroup checker.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fde/orders.hpp"

namespace fde {

struct PowerTerm {
  Order exponent;
  double coeff = 0.0;
};

class PowerSum {
 public:
  /// Relative tolerance used for coefficient comparisons and cancellation.
  static constexpr double kCoeffTolerance = 1e-12;

  explicit PowerSum(double base = 0.0) : base_(base) {}

  static PowerSum monomial(double base, const Order& exponent, double coeff = 1.0);

  /// Adds c (t-a)^p, merging with an existing term of the same exponent and
  /// dropping the term if the coefficients cancel.
  PowerSum& add(const Order& exponent, double coeff);

  double base() const noexcept { return base_; }
  std::span<const PowerTerm> terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::optional<Order> min_exponent() const;

  /// True when every exponent is > -1, i.e. the function lies in L1[a,b].
  bool is_integrable() const;

  /// Pointwise value for t > a (t == a is fine when all exponents are >= 0).
  double operator()(double t) const;

  PowerSum operator+(const PowerSum& other) const;
  PowerSum operator-(const PowerSum& other) const;
  PowerSum scaled(double factor) const;

  /// Same base, identical exponent sets, and coefficients equal to
  /// `rel_tol` relative (absolute 1e-300 floor).
  bool approx_equal(const PowerSum& other, double rel_tol = kCoeffTolerance) const;

  /// "c1*(t-a)^p1 + c2*(t-a)^p2", coefficients to 17 significant digits,
  /// exact exponents as "n" or "(p/q)". The zero function renders as "0".
  std::string str() const;

  /// Inverse of str(); also accepts "(t)^0.5", "3", "2*(t-1)^(3/2) - (t-1)".
  /// Decimal exponents are converted exactly from their literal text.
  static PowerSum parse(std::string_view text);

 private:
  void check_base(const PowerSum& other) const;

  double base_;
  std::vector<PowerTerm> terms_;  // ascending exponent, unique, non-zero coeff
};

enum class Regularity { Continuous, L1Only, NotL1, Undefined };

std::string_view to_string(Regularity r);

struct RegularityClass {
  Regularity tag = Regularity::Continuous;
  /// Present iff tag == Continuous.
  std::optional<double> value_at_a;

  /// Classification of a power sum by its smallest exponent: >= 0 continuous,
  /// in (-1, 0) integrable only, <= -1 not integrable.
  static RegularityClass of(const PowerSum& f);
  static RegularityClass undefined() { return {Regularity::Undefined, std::nullopt}; }
};

struct DerivativeResult {
  PowerSum value;
  RegularityClass regularity;
  /// Reason when the regularity is Undefined.
  std::string note;
};

/// J_a^α f, termwise c (t-a)^p -> c Γ(p+1)/Γ(p+1+α) (t-a)^{p+α}. J^0 = I.
/// Throws std::invalid_argument if f is not integrable or α < 0.
PowerSum rl_integral(const PowerSum& f, const Order& alpha);

/// ^RL D_a^α f, termwise c (t-a)^p -> c Γ(p+1)/Γ(p+1-α) (t-a)^{p-α}. Terms
/// hitting a pole of Γ(p+1-α) are annihilated. Result exponents may be <= -1;
/// the regularity class reports it.
DerivativeResult rl_derivative(const PowerSum& f, const Order& alpha);

/// T_degree[f; a]: the integer-exponent terms of f up to `degree`. Throws
/// DomainError when a non-integer exponent below `degree` makes some
/// derivative D^k f(a), k <= degree, non-existent.
PowerSum taylor_polynomial(const PowerSum& f, std::int64_t degree);
PowerSum taylor_polynomial(const PowerSum& f, std::int64_t degree, double a);

/// ^C D_a^α f = ^RL D_a^α (f - T_{⌈α⌉-1}[f; a]). Regularity is Undefined when
/// f is not in C^{⌈α⌉-1}[a,b]. α = 0 is the identity.
DerivativeResult caputo_derivative(const PowerSum& f, const Order& alpha);

// --- semigroup checker ------------------------------------------------------

enum class SemigroupMode { RiemannLiouville, Caputo, IntegerSplit };
enum class Verdict { Holds, Violated, OuterUndefined };

std::string_view to_string(SemigroupMode m);
std::string_view to_string(Verdict v);

struct SemigroupReport {
  SemigroupMode mode = SemigroupMode::Caputo;
  Order beta;
  Order gamma;
  /// Order for which f was tested for continuous differentiability
  /// (defaults to beta + gamma).
  Order alpha;
  DerivativeResult inner;   // D^beta f
  DerivativeResult outer;   // D^gamma (D^beta f)
  DerivativeResult direct;  // D^{beta+gamma} f
  Verdict verdict = Verdict::Violated;
  bool hypothesis_met = false;
  std::string theorem_citation;
};

/// Computes inner = D^β f, outer = D^γ(inner) and direct = D^{β+γ} f in the
/// selected mode and compares outer with direct symbolically.
///
/// The continuous setting is used throughout: the outer operator is applied
/// only to a continuous inner result, otherwise the verdict is OuterUndefined.
/// The report also states which partial-semigroup theorem, if any, has its
/// hypotheses satisfied by (f, β, γ, α). In IntegerSplit mode β must be a
/// non-negative integer l and the inner operator is the classical D^l.
SemigroupReport check_semigroup(const PowerSum& f, const Order& beta, const Order& gamma, SemigroupMode mode,
                                std::optional<Order> alpha = std::nullopt);

std::string render(const SemigroupReport& report);

}  // namespace fde
