#include "fde/expr.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fde/error.hpp"
#include "fde/specfun.hpp"

namespace fde {

namespace {

struct FunctionInfo {
  std::string_view name;
  std::size_t arity;
};

constexpr std::array<FunctionInfo, 7> kFunctions{{
    {"gamma", 1},
    {"mlf", 3},
    {"exp", 1},
    {"sin", 1},
    {"cos", 1},
    {"abs", 1},
    {"pow", 2},
}};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

// "x12" -> ('x', 12); anything else -> ('\0', 0).
std::pair<char, std::size_t> split_variable(std::string_view id) {
  if (id == "t") return {'t', 0};
  if (id.size() < 2 || (id[0] != 'x' && id[0] != 'd') || id[1] == '0') return {'\0', 0};
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
  if (ec != std::errc() || ptr != id.data() + id.size() || n == 0) return {'\0', 0};
  return {id[0], n};
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr run() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      const std::size_t at = pos_++;
      lhs = binary(c, lhs, term(), at);
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      const std::size_t at = pos_++;
      lhs = binary(c, lhs, unary(), at);
    }
  }

  ExprPtr unary() {
    skip_ws();
    const char c = peek();
    if (c == '-' || c == '+') {
      const std::size_t at = pos_++;
      ExprPtr inner = unary();
      if (c == '+') return inner;
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Negate;
      e->args.push_back(std::move(inner));
      e->offset = at;
      return e;
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    skip_ws();
    if (peek() != '^') return base;
    const std::size_t at = pos_++;
    return binary('^', base, unary(), at);
  }

  ExprPtr primary() {
    skip_ws();
    const std::size_t at = pos_;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view id = src_.substr(at, pos_ - at);
      skip_ws();
      if (peek() == '(') return call(id, at);
      const auto [kind, n] = split_variable(id);
      if (kind == '\0') {
        if (find_function(id)) throw ParseError("function '" + std::string(id) + "' needs arguments", at);
        throw ParseError("unknown identifier '" + std::string(id) + "'", at);
      }
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Variable;
      e->name = std::string(id);
      e->index = n;
      e->offset = at;
      return e;
    }
    if (pos_ == src_.size()) throw ParseError("unexpected end of expression", pos_);
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  ExprPtr call(std::string_view id, std::size_t at) {
    const FunctionInfo* fn = find_function(id);
    if (!fn) throw ParseError("unknown function '" + std::string(id) + "'", at);
    expect('(');
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Call;
    e->name = std::string(id);
    e->offset = at;
    skip_ws();
    if (peek() != ')') {
      e->args.push_back(expr());
      skip_ws();
      while (peek() == ',') {
        ++pos_;
        e->args.push_back(expr());
        skip_ws();
      }
    }
    expect(')');
    if (e->args.size() != fn->arity)
      throw ParseError(std::string(id) + " takes " + std::to_string(fn->arity) + " argument" +
                           (fn->arity == 1 ? "" : "s") + ", got " + std::to_string(e->args.size()),
                       at);
    return e;
  }

  ExprPtr number() {
    const std::size_t at = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t nd = digits();
    if (peek() == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw ParseError("malformed number", at);
    if (peek() == 'e' || peek() == 'E') {
      const std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by an identifier
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("number out of range", at);
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Number;
    e->number = v;
    e->offset = at;
    return e;
  }

  static ExprPtr binary(char op, ExprPtr lhs, ExprPtr rhs, std::size_t at) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->op = op;
    e->args = {std::move(lhs), std::move(rhs)};
    e->offset = at;
    return e;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) {
      if (pos_ == src_.size()) throw ParseError(std::string("expected '") + c + "' before end of expression", pos_);
      throw ParseError(std::string("expected '") + c + "', found '" + src_[pos_] + "'", pos_);
    }
    ++pos_;
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(std::string_view src) { return Parser(src).run(); }

std::string render(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      return buf;
    }
    case ExprKind::Variable: return e.name;
    case ExprKind::Negate: return "(-" + render(*e.args[0]) + ")";
    case ExprKind::Binary: return "(" + render(*e.args[0]) + " " + e.op + " " + render(*e.args[1]) + ")";
    case ExprKind::Call: {
      std::string s = e.name + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + render(*e.args[i]);
      return s + ")";
    }
  }
  return {};
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.op != b.op || a.name != b.name || a.index != b.index) return false;
  if (std::bit_cast<std::uint64_t>(a.number) != std::bit_cast<std::uint64_t>(b.number)) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  return true;
}

namespace {

[[noreturn]] void domain_at(const Expr& e, const std::string& what) {
  throw DomainError("at offset " + std::to_string(e.offset) + " (" + e.name + "): " + what);
}

}  // namespace

double eval(const Expr& e, const ExprEnv& env) {
  switch (e.kind) {
    case ExprKind::Number: return e.number;
    case ExprKind::Variable: {
      if (e.name == "t") return env.t;
      const auto& vals = e.name[0] == 'x' ? env.x : env.d;
      if (e.index > vals.size())
        throw std::invalid_argument("unbound variable '" + e.name + "' at offset " + std::to_string(e.offset));
      return vals[e.index - 1];
    }
    case ExprKind::Negate: return -eval(*e.args[0], env);
    case ExprKind::Binary: {
      const double l = eval(*e.args[0], env);
      const double r = eval(*e.args[1], env);
      switch (e.op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        case '/': return l / r;
        case '^': return std::pow(l, r);
      }
      break;
    }
    case ExprKind::Call: {
      std::array<double, 3> v{};
      for (std::size_t i = 0; i < e.args.size(); ++i) v[i] = eval(*e.args[i], env);
      try {
        if (e.name == "gamma") return gamma(v[0]);
        if (e.name == "mlf") return mittag_leffler({v[0], v[1], v[2]});
      } catch (const std::exception& ex) {
        domain_at(e, ex.what());
      }
      if (e.name == "exp") return std::exp(v[0]);
      if (e.name == "sin") return std::sin(v[0]);
      if (e.name == "cos") return std::cos(v[0]);
      if (e.name == "abs") return std::abs(v[0]);
      if (e.name == "pow") return std::pow(v[0], v[1]);
      break;
    }
  }
  throw std::logic_error("malformed expression tree");
}

void check_bindings(const Expr& e, std::size_t x_count, std::size_t d_count) {
  if (e.kind == ExprKind::Variable && e.name != "t") {
    const std::size_t limit = e.name[0] == 'x' ? x_count : d_count;
    if (e.index > limit) {
      const std::string allowed = limit == 0 ? std::string("no ") + e.name[0] + " variables are available"
                                             : std::string("available: ") + e.name[0] + "1.." + e.name[0] +
                                                   std::to_string(limit);
      throw ParseError("unbound variable '" + e.name + "' (" + allowed + ")", e.offset);
    }
  }
  for (const auto& a : e.args) check_bindings(*a, x_count, d_count);
}

bool is_literal_zero(const Expr& e) { return e.kind == ExprKind::Number && e.number == 0.0; }

}  // namespace fde
