#pragma once

// Right-hand-side expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative, binds tighter than unary minus
//   primary := number | variable | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables: t, x1..xk (state), d1..dk (d_j = ^C D^{α_j} x in multi-term
// problems). Functions: gamma/1, mlf/3 (E_{α,β}(z)), exp/1, sin/1, cos/1,
// abs/1, pow/2. No implicit multiplication.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fde {

enum class ExprKind { Number, Variable, Negate, Binary, Call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Number;
  double number = 0.0;
  /// Variable or function name.
  std::string name;
  /// For variables x<n>/d<n>: n (1-based). 0 for t.
  std::size_t index = 0;
  /// '+', '-', '*', '/', '^' for Binary.
  char op = 0;
  std::vector<ExprPtr> args;
  /// Byte offset of the node in the source.
  std::size_t offset = 0;
};

/// Throws ParseError (with byte offset) on syntax errors, unknown
/// identifiers and wrong argument counts. Never evaluates anything.
ExprPtr parse_expression(std::string_view src);

/// Fully parenthesized text that reparses to an identical tree.
std::string render(const Expr& e);

/// Structural equality (offsets ignored; numbers compared bitwise).
bool same_tree(const Expr& a, const Expr& b);

struct ExprEnv {
  double t = 0.0;
  std::span<const double> x;
  std::span<const double> d;
};

/// IEEE double evaluation. Throws std::invalid_argument for unbound
/// variables and DomainError (prefixed with the node offset) for domain
/// errors such as gamma poles.
double eval(const Expr& e, const ExprEnv& env);

/// Throws ParseError at the first variable outside t, x1..x_count,
/// d1..d_count.
void check_bindings(const Expr& e, std::size_t x_count, std::size_t d_count);

/// True if the tree is the literal 0.
bool is_literal_zero(const Expr& e);

}  // namespace fde
