#include "fde/specfun.hpp"

#include <quadmath.h>

#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fde/error.hpp"

namespace fde {

namespace {

using quad = __float128;

constexpr double kMaxTgammaArg = 171.0;
// Γ overflows binary128 near 1755.
constexpr double kMaxTgammaqArg = 1700.0;
// Unit roundoff of binary128.
const quad kQuadEps = ldexpq(1, -112);

bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }

bool is_pole(quad x) { return x <= 0 && x == floorq(x); }

quad rgamma_q(quad x) {
  if (is_pole(x)) return 0;
  if (x < kMaxTgammaqArg) return 1 / tgammaq(x);
  return expq(-lgammaq(x));
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  quad sum = 0;
  quad carry = 0;

  void add(quad v) {
    const quad t = sum + v;
    if (fabsq(sum) >= fabsq(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  quad value() const { return sum + carry; }
};

struct SeriesResult {
  quad re = 0;
  quad im = 0;
};

// Shared series engine; `theta` is arg(z) and is ignored (sign handling via
// `negative_real`) when `is_complex` is false.
SeriesResult ml_series(double alpha, double beta, double modulus, double theta, bool is_complex,
                       const MLOptions& opts) {
  const quad r = modulus;
  const quad log_r = logq(r);
  const quad a = alpha;
  const quad b = beta;
  const quad th = theta;

  CompensatedSum re;
  CompensatedSum im;
  quad abs_sum = 0;
  quad prev_mag = -1;
  const double target = std::min(opts.tolerance, 1e-17);

  for (int k = 0; k < opts.max_terms; ++k) {
    const quad x = a * k + b;
    quad mag;  // signed for the real-axis case
    if (k == 0) {
      mag = rgamma_q(b);
    } else if (x > 0) {
      mag = expq(k * log_r - lgammaq(x));
    } else {
      mag = powq(r, k) * rgamma_q(x);
    }
    if (!(fabsq(mag) < static_cast<quad>(DBL_MAX)))
      throw DomainError("Mittag-Leffler series overflows double precision (alpha=" + std::to_string(alpha) +
                        ", |z|=" + std::to_string(modulus) + ")");

    quad t_re;
    quad t_im = 0;
    if (is_complex) {
      t_re = mag * cosq(th * k);
      t_im = mag * sinq(th * k);
    } else {
      // theta == pi encodes a negative real argument.
      t_re = (theta != 0.0 && (k % 2 == 1)) ? -mag : mag;
    }
    re.add(t_re);
    im.add(t_im);
    const quad term_abs = fabsq(mag);
    abs_sum += term_abs;

    const quad s_re = re.value();
    const quad s_im = im.value();
    const quad s_abs = sqrtq(s_re * s_re + s_im * s_im);
    const quad scale = s_abs > 1 ? s_abs : 1;

    // Tail bound needs the ratio |t_k/t_{k-1}| to be non-increasing from
    // here on, which holds once α(k-1)+β > 0.
    if (k >= 1 && prev_mag > 0 && a * (k - 1) + b > 0) {
      const quad q = term_abs / prev_mag;
      if (q < 1) {
        const quad tail = term_abs * q / (1 - q);
        if (tail <= target * scale) {
          if (64 * kQuadEps * abs_sum > opts.tolerance * scale)
            throw DomainError("Mittag-Leffler series cancellation exceeds working precision");
          if (!(s_abs < static_cast<quad>(DBL_MAX)))
            throw DomainError("Mittag-Leffler value overflows double precision");
          return {s_re, s_im};
        }
      }
    }
    if (r == 0) return {s_re, s_im};
    prev_mag = term_abs;
  }
  throw DomainError("Mittag-Leffler series did not converge within " + std::to_string(opts.max_terms) + " terms");
}

void check_ml_args(double alpha, double modulus, const MLOptions& opts) {
  if (!(alpha > 0)) throw std::invalid_argument("Mittag-Leffler alpha must be positive");
  if (!std::isfinite(modulus) || modulus > opts.max_abs_z)
    throw DomainError("|z| = " + std::to_string(modulus) + " exceeds the Mittag-Leffler budget of " +
                      std::to_string(opts.max_abs_z));
}

}  // namespace

double gamma(double x) {
  if (is_pole(x)) throw DomainError("Gamma pole at " + std::to_string(x));
  const double g = std::tgamma(x);
  if (!std::isfinite(g)) throw DomainError("Gamma overflow at " + std::to_string(x));
  return g;
}

double rgamma(double x) {
  if (is_pole(x)) return 0.0;
  if (x < kMaxTgammaArg) return 1.0 / std::tgamma(x);
  return std::exp(-std::lgamma(x));
}

double gamma_ratio(double x, double y) {
  if (is_pole(x)) throw DomainError("Gamma pole at " + std::to_string(x));
  if (is_pole(y)) return 0.0;
  if (std::abs(x) < kMaxTgammaArg - 1 && std::abs(y) < kMaxTgammaArg - 1) return std::tgamma(x) / std::tgamma(y);
  int sx = 1;
  int sy = 1;
  const double lx = ::lgamma_r(x, &sx);
  const double ly = ::lgamma_r(y, &sy);
  return sx * sy * std::exp(lx - ly);
}

double mittag_leffler(const MLParams& p, const MLOptions& opts) {
  if (!std::isfinite(p.beta)) throw std::invalid_argument("Mittag-Leffler beta must be finite");
  check_ml_args(p.alpha, std::abs(p.z), opts);
  const auto s = ml_series(p.alpha, p.beta, std::abs(p.z), p.z < 0 ? M_PI : 0.0, false, opts);
  return static_cast<double>(s.re);
}

std::complex<double> mittag_leffler(double alpha, double beta, std::complex<double> z, const MLOptions& opts) {
  if (!std::isfinite(beta)) throw std::invalid_argument("Mittag-Leffler beta must be finite");
  check_ml_args(alpha, std::abs(z), opts);
  if (z.imag() == 0.0) return mittag_leffler({alpha, beta, z.real()}, opts);
  const auto s = ml_series(alpha, beta, std::abs(z), std::arg(z), true, opts);
  return {static_cast<double>(s.re), static_cast<double>(s.im)};
}

double ml_solution(double alpha, double lambda, double x0, double t) {
  if (!(alpha > 0 && alpha <= 2)) throw std::invalid_argument("ml_solution requires alpha in (0, 2]");
  if (!(t >= 0)) throw std::invalid_argument("ml_solution requires t >= 0");
  if (t == 0) return x0;
  return x0 * mittag_leffler({alpha, 1.0, lambda * std::pow(t, alpha)});
}

}  // namespace fde
