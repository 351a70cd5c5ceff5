#include "fde/powcalc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "fde/error.hpp"
#include "fde/specfun.hpp"

namespace fde {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_exponent(const Order& p) {
  if (p.is_exact()) {
    const Rational& r = *p.exact();
    if (r.is_integer() && r.num() >= 0) return r.str();
    return "(" + r.str() + ")";
  }
  const std::string s = fmt17(p.value());
  return p.value() < 0 ? "(" + s + ")" : s;
}

}  // namespace

PowerSum PowerSum::monomial(double base, const Order& exponent, double coeff) {
  PowerSum s(base);
  s.add(exponent, coeff);
  return s;
}

PowerSum& PowerSum::add(const Order& exponent, double coeff) {
  if (!std::isfinite(coeff)) throw std::invalid_argument("power sum coefficient must be finite");
  if (coeff == 0.0) return *this;
  auto it = std::find_if(terms_.begin(), terms_.end(), [&](const PowerTerm& t) { return !(t.exponent < exponent); });
  if (it != terms_.end() && it->exponent == exponent) {
    const double merged = it->coeff + coeff;
    const double scale = std::max(std::abs(it->coeff), std::abs(coeff));
    if (std::abs(merged) <= 1e-14 * scale)
      terms_.erase(it);
    else
      it->coeff = merged;
    return *this;
  }
  terms_.insert(it, PowerTerm{exponent, coeff});
  return *this;
}

std::optional<Order> PowerSum::min_exponent() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.front().exponent;
}

bool PowerSum::is_integrable() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PowerTerm& t) { return t.exponent > Order(-1); });
}

double PowerSum::operator()(double t) const {
  const double x = t - base_;
  double sum = 0.0;
  for (const auto& term : terms_) {
    if (term.exponent == Order(0))
      sum += term.coeff;
    else
      sum += term.coeff * std::pow(x, term.exponent.value());
  }
  return sum;
}

void PowerSum::check_base(const PowerSum& other) const {
  if (other.base_ != base_) throw std::invalid_argument("power sums centred at different points");
}

PowerSum PowerSum::operator+(const PowerSum& other) const {
  check_base(other);
  PowerSum r = *this;
  for (const auto& t : other.terms_) r.add(t.exponent, t.coeff);
  return r;
}

PowerSum PowerSum::operator-(const PowerSum& other) const { return *this + other.scaled(-1.0); }

PowerSum PowerSum::scaled(double factor) const {
  PowerSum r(base_);
  if (factor == 0.0) return r;
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff *= factor;
  return r;
}

bool PowerSum::approx_equal(const PowerSum& other, double rel_tol) const {
  if (base_ != other.base_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& x = terms_[i];
    const auto& y = other.terms_[i];
    if (!(x.exponent == y.exponent)) return false;
    const double scale = std::max(std::abs(x.coeff), std::abs(y.coeff));
    if (std::abs(x.coeff - y.coeff) > std::max(rel_tol * scale, 1e-300)) return false;
  }
  return true;
}

std::string PowerSum::str() const {
  if (terms_.empty()) return "0";
  std::string var;
  if (base_ == 0.0)
    var = "(t)";
  else if (base_ > 0)
    var = "(t-" + fmt17(base_) + ")";
  else
    var = "(t+" + fmt17(-base_) + ")";

  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    double c = t.coeff;
    if (i == 0) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      c = std::abs(c);
    }
    out += fmt17(c) + "*" + var + "^" + render_exponent(t.exponent);
  }
  return out;
}

// --- parsing ----------------------------------------------------------------

namespace {

class PowerSumParser {
 public:
  explicit PowerSumParser(std::string_view text) : text_(text) {}

  PowerSum run() {
    std::vector<std::pair<Order, double>> terms;
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty power sum", pos_);
    double sign = 1.0;
    if (peek() == '-' || peek() == '+') {
      sign = take() == '-' ? -1.0 : 1.0;
      skip_ws();
    }
    for (;;) {
      auto [p, c] = term();
      terms.emplace_back(p, sign * c);
      skip_ws();
      if (pos_ == text_.size()) break;
      const char op = take();
      if (op != '+' && op != '-') throw ParseError(std::string("expected '+' or '-', found '") + op + "'", pos_ - 1);
      sign = op == '-' ? -1.0 : 1.0;
      skip_ws();
    }
    PowerSum s(base_.value_or(0.0));
    for (const auto& [p, c] : terms) {
      if (!(p > Order(-1))) throw std::invalid_argument("power sum exponent " + p.str() + " is not > -1");
      s.add(p, c);
    }
    return s;
  }

 private:
  std::pair<Order, double> term() {
    double coeff = 1.0;
    bool have_coeff = false;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      coeff = number();
      have_coeff = true;
      skip_ws();
      if (peek() == '*') {
        take();
        skip_ws();
      } else {
        return {Order(0), coeff};
      }
    }
    if (peek() != '(') throw ParseError(have_coeff ? "expected '(t'" : "expected a coefficient or '(t'", pos_);
    take();
    skip_ws();
    if (peek() != 't') throw ParseError("expected 't'", pos_);
    take();
    skip_ws();
    double a = 0.0;
    if (peek() == '-' || peek() == '+') {
      const double s = take() == '-' ? 1.0 : -1.0;
      skip_ws();
      a = s * number();
      skip_ws();
    }
    if (peek() != ')') throw ParseError("expected ')'", pos_);
    take();
    if (base_ && *base_ != a) throw ParseError("all terms must share one base point", pos_);
    base_ = a;
    skip_ws();
    Order p(1);
    if (peek() == '^') {
      take();
      skip_ws();
      p = exponent();
    }
    return {p, coeff};
  }

  Order exponent() {
    const bool paren = peek() == '(';
    if (paren) {
      take();
      skip_ws();
    }
    const std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') take();
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            (paren && text_[pos_] == '/') || text_[pos_] == 'e' || text_[pos_] == 'E' ||
            ((text_[pos_] == '-' || text_[pos_] == '+') && pos_ > start &&
             (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
      ++pos_;
    const std::string_view lit = text_.substr(start, pos_ - start);
    if (lit.empty()) throw ParseError("expected an exponent", start);
    Order result;
    try {
      result = Order(parse_rational(lit));
    } catch (const std::exception&) {
      // Long decimals (rendered opaque exponents) and scientific notation.
      const std::string s(lit);
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end != s.c_str() + s.size()) throw ParseError("malformed exponent '" + s + "'", start);
      result = Order::real(v);
    }
    if (paren) {
      skip_ws();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      take();
    }
    return result;
  }

  double number() {
    const std::size_t start = pos_;
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) throw ParseError("expected a number", start);
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char take() { return text_[pos_++]; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::optional<double> base_;
};

}  // namespace

PowerSum PowerSum::parse(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") != std::string_view::npos &&
      text.substr(text.find_first_not_of(" \t\r\n")) == "0")
    return PowerSum(0.0);
  return PowerSumParser(text).run();
}

// --- regularity -------------------------------------------------------------

std::string_view to_string(Regularity r) {
  switch (r) {
    case Regularity::Continuous: return "Continuous";
    case Regularity::L1Only: return "L1Only";
    case Regularity::NotL1: return "NotL1";
    case Regularity::Undefined: return "Undefined";
  }
  return "?";
}

RegularityClass RegularityClass::of(const PowerSum& f) {
  const auto lo = f.min_exponent();
  if (!lo || *lo >= Order(0)) {
    double at_a = 0.0;
    for (const auto& t : f.terms())
      if (t.exponent == Order(0)) at_a = t.coeff;
    return {Regularity::Continuous, at_a};
  }
  if (*lo > Order(-1)) return {Regularity::L1Only, std::nullopt};
  return {Regularity::NotL1, std::nullopt};
}

// --- operators --------------------------------------------------------------

PowerSum rl_integral(const PowerSum& f, const Order& alpha) {
  if (alpha < Order(0)) throw std::invalid_argument("integration order must be non-negative");
  if (!f.is_integrable()) throw std::invalid_argument("rl_integral requires an integrable power sum");
  if (alpha == Order(0)) return f;
  PowerSum r(f.base());
  for (const auto& t : f.terms()) {
    const double p = t.exponent.value();
    r.add(t.exponent + alpha, t.coeff * gamma_ratio(p + 1.0, p + 1.0 + alpha.value()));
  }
  return r;
}

DerivativeResult rl_derivative(const PowerSum& f, const Order& alpha) {
  if (alpha < Order(0)) throw std::invalid_argument("differentiation order must be non-negative");
  if (!f.is_integrable()) throw std::invalid_argument("rl_derivative requires an integrable power sum");
  if (alpha == Order(0)) return {f, RegularityClass::of(f), {}};
  PowerSum r(f.base());
  for (const auto& t : f.terms()) {
    const Order shifted = t.exponent + Order(1) - alpha;  // argument of the denominator Gamma
    if (shifted <= Order(0) && shifted.is_integer()) continue;  // 1/Γ pole: D^m kills it
    const double p = t.exponent.value();
    r.add(t.exponent - alpha, t.coeff * gamma_ratio(p + 1.0, shifted.value()));
  }
  return {r, RegularityClass::of(r), {}};
}

PowerSum taylor_polynomial(const PowerSum& f, std::int64_t degree) {
  PowerSum r(f.base());
  for (const auto& t : f.terms()) {
    if (t.exponent.is_integer()) {
      if (t.exponent.as_integer() <= degree) r.add(t.exponent, t.coeff);
    } else if (t.exponent < Order(degree)) {
      throw DomainError("term (t-a)^" + t.exponent.str() + " has no derivative of order " +
                        std::to_string(static_cast<std::int64_t>(std::floor(t.exponent.value())) + 1) + " at a");
    }
  }
  return r;
}

PowerSum taylor_polynomial(const PowerSum& f, std::int64_t degree, double a) {
  if (a != f.base()) throw std::invalid_argument("Taylor polynomial must be centred at the power sum's base point");
  return taylor_polynomial(f, degree);
}

DerivativeResult caputo_derivative(const PowerSum& f, const Order& alpha) {
  if (alpha < Order(0)) throw std::invalid_argument("differentiation order must be non-negative");
  if (alpha == Order(0)) return {f, RegularityClass::of(f), {}};
  const std::int64_t m = alpha.ceil();
  PowerSum taylor(f.base());
  try {
    taylor = taylor_polynomial(f, m - 1);
  } catch (const DomainError& e) {
    return {PowerSum(f.base()), RegularityClass::undefined(),
            "not in C^" + std::to_string(m - 1) + "[a,b]: " + e.what()};
  }
  return rl_derivative(f - taylor, alpha);
}

// --- semigroup checker ------------------------------------------------------

std::string_view to_string(SemigroupMode m) {
  switch (m) {
    case SemigroupMode::RiemannLiouville: return "rl";
    case SemigroupMode::Caputo: return "caputo";
    case SemigroupMode::IntegerSplit: return "split";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::OuterUndefined: return "OUTER_UNDEFINED";
  }
  return "?";
}

namespace {

bool continuous(const DerivativeResult& r) { return r.regularity.tag == Regularity::Continuous; }

DerivativeResult undefined_result(double base, std::string note) {
  return {PowerSum(base), RegularityClass::undefined(), std::move(note)};
}

// Outer operator applied formally; a non-integrable inner has no outer at all.
DerivativeResult apply_outer(const DerivativeResult& inner, const Order& gamma, bool caputo) {
  if (inner.regularity.tag == Regularity::Undefined || inner.regularity.tag == Regularity::NotL1)
    return undefined_result(inner.value.base(), "inner derivative is not integrable");
  return caputo ? caputo_derivative(inner.value, gamma) : rl_derivative(inner.value, gamma);
}

struct Hypothesis {
  bool met = false;
  std::string citation;
};

Hypothesis caputo_hypothesis(const PowerSum& f, const Order& beta, const Order& gamma, const Order& alpha,
                             const DerivativeResult& inner, const DerivativeResult& outer) {
  const bool ceiling_gap = (beta + gamma).ceil() - beta.floor() == 1;
  const bool gamma_le_one = gamma <= Order(1);
  if (ceiling_gap && gamma_le_one && beta + gamma <= alpha && continuous(caputo_derivative(f, alpha)))
    return {true,
            "Caputo partial semigroup, part I: f continuously Caputo alpha-differentiable, 0 < gamma <= 1, "
            "beta+gamma <= alpha, ceil(beta+gamma) - floor(beta) = 1"};
  const bool vanishes = beta.is_integer() || (inner.regularity.value_at_a && *inner.regularity.value_at_a == 0.0);
  if (ceiling_gap && gamma_le_one && continuous(inner) && continuous(outer) && vanishes)
    return {true,
            "Caputo partial semigroup, part II (converse): inner and outer continuous, inner vanishes at a for "
            "non-integer beta, 0 < gamma <= 1, ceil(beta+gamma) - floor(beta) = 1"};
  return {false, "no partial-semigroup theorem applies (Caputo)"};
}

Hypothesis rl_hypothesis(const PowerSum& f, const Order& beta, const Order& gamma, const Order& alpha,
                         const DerivativeResult& inner, const DerivativeResult& outer) {
  const bool f_continuous = RegularityClass::of(f).tag == Regularity::Continuous;
  const bool f_rl_alpha = f_continuous && continuous(rl_derivative(f, alpha));
  if (f_rl_alpha && alpha < Order(1) && beta < alpha && gamma == alpha - beta)
    return {true, "RL partial semigroup, part I: 0 <= beta < alpha < 1, f continuously RL alpha-differentiable"};
  if (beta < Order(1) && f_continuous && continuous(inner) && continuous(outer))
    return {true, "RL partial semigroup, part II (converse): 0 < beta < 1, inner and outer continuous"};
  if (f_rl_alpha && alpha > Order(1) && gamma == alpha - beta && gamma.is_integer())
    return {true, "RL semigroup for alpha > 1: alpha - beta integer, f continuously RL alpha-differentiable"};
  if (f_rl_alpha && alpha > Order(1) && !alpha.is_integer() && beta + gamma <= alpha - Order(alpha.floor()))
    return {true,
            "RL semigroup for alpha > 1: beta+gamma <= alpha - floor(alpha), f continuously RL "
            "alpha-differentiable"};
  return {false, "no partial-semigroup theorem applies (Riemann-Liouville)"};
}

Hypothesis split_hypothesis(const PowerSum& f, const Order& l, const Order& gamma, const Order& alpha) {
  if (l <= Order(alpha.ceil() - 1) && gamma == alpha - l && continuous(caputo_derivative(f, alpha)))
    return {true,
            "integer split: 0 <= l <= ceil(alpha)-1, f continuously Caputo alpha-differentiable, "
            "C D^(alpha-l) D^l f = C D^alpha f"};
  return {false, "no integer-split theorem applies"};
}

}  // namespace

SemigroupReport check_semigroup(const PowerSum& f, const Order& beta, const Order& gamma, SemigroupMode mode,
                                std::optional<Order> alpha) {
  if (!(beta > Order(0)) && mode != SemigroupMode::IntegerSplit)
    throw std::invalid_argument("check_semigroup requires beta > 0");
  if (!(gamma > Order(0))) throw std::invalid_argument("check_semigroup requires gamma > 0");
  if (mode == SemigroupMode::IntegerSplit && (!beta.is_integer() || beta < Order(0)))
    throw std::invalid_argument("integer-split mode requires beta to be a non-negative integer");
  if (!f.is_integrable()) throw std::invalid_argument("check_semigroup requires an integrable power sum");

  SemigroupReport rep;
  rep.mode = mode;
  rep.beta = beta;
  rep.gamma = gamma;
  rep.alpha = alpha.value_or(beta + gamma);
  const Order total = beta + gamma;

  switch (mode) {
    case SemigroupMode::RiemannLiouville:
      rep.inner = rl_derivative(f, beta);
      rep.outer = apply_outer(rep.inner, gamma, false);
      rep.direct = rl_derivative(f, total);
      break;
    case SemigroupMode::Caputo:
      rep.inner = caputo_derivative(f, beta);
      rep.outer = apply_outer(rep.inner, gamma, true);
      rep.direct = caputo_derivative(f, total);
      break;
    case SemigroupMode::IntegerSplit:
      rep.inner = rl_derivative(f, beta);  // classical D^l
      rep.outer = apply_outer(rep.inner, gamma, true);
      rep.direct = caputo_derivative(f, total);
      break;
  }

  if (!continuous(rep.inner) || rep.outer.regularity.tag == Regularity::Undefined)
    rep.verdict = Verdict::OuterUndefined;
  else if (rep.outer.regularity.tag == rep.direct.regularity.tag && rep.outer.value.approx_equal(rep.direct.value))
    rep.verdict = Verdict::Holds;
  else
    rep.verdict = Verdict::Violated;

  Hypothesis h;
  switch (mode) {
    case SemigroupMode::RiemannLiouville: h = rl_hypothesis(f, beta, gamma, rep.alpha, rep.inner, rep.outer); break;
    case SemigroupMode::Caputo: h = caputo_hypothesis(f, beta, gamma, rep.alpha, rep.inner, rep.outer); break;
    case SemigroupMode::IntegerSplit: h = split_hypothesis(f, beta, gamma, rep.alpha); break;
  }
  rep.hypothesis_met = h.met;
  rep.theorem_citation = std::move(h.citation);
  return rep;
}

namespace {

std::string describe(const DerivativeResult& r) {
  std::string s = r.value.str() + "  [" + std::string(to_string(r.regularity.tag));
  if (r.regularity.value_at_a) s += ", value at a = " + fmt17(*r.regularity.value_at_a);
  if (!r.note.empty()) s += ", " + r.note;
  return s + "]";
}

}  // namespace

std::string render(const SemigroupReport& rep) {
  const bool split = rep.mode == SemigroupMode::IntegerSplit;
  const std::string inner_op = split ? "D^l" : "D^beta";
  std::ostringstream os;
  os << to_string(rep.verdict) << " mode=" << to_string(rep.mode) << " beta=" << rep.beta.str()
     << " gamma=" << rep.gamma.str() << "\n";
  os << "hypothesis: " << (rep.hypothesis_met ? "met" : "not met") << " (alpha=" << rep.alpha.str() << "; "
     << rep.theorem_citation << ")\n";
  os << "inner:  " << inner_op << " f = " << describe(rep.inner) << "\n";
  os << "outer:  D^gamma(" << inner_op << " f) = " << describe(rep.outer) << "\n";
  os << "direct: D^(beta+gamma) f = " << describe(rep.direct) << "\n";
  return os.str();
}

}  // namespace fde
