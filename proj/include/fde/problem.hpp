#pragma once

// JSON problem files.
//
//   {
//     "version": 1,
//     "kind": "multi_term" | "multi_order" | "single_term",
//     "interval": {"a": 0, "b": 2},
//     "orders": ["1", "3/2"],
//     "equations": [{"order": "3/2", "rhs": "d1"}]      -- or --
//     "matrix": [[0, 1]], "forcing": ["0"],
//     "initial": [0, 1],
//     "solver": {"h": 0.0009765625, "t_end": 2}
//   }
//
// multi_term: orders α_1 < ... < α_k; a single equation for the leading order
//   α_k whose rhs may use t, x1 (= x) and d1..d_{k-1} (d_j = ^C D^{α_j} x); a
//   linear rhs is a 1 x k matrix over (x, d1, ..., d_{k-1}). initial holds
//   x_a^{(j)}, j < ⌈α_k⌉.
// multi_order: one order per component in (0, 1]; one equation per component
//   (rhs over t, x1..xn) or an n x n matrix.
// single_term: like multi_order with every order equal; a single order entry
//   applies to all components.
// Orders are strings so they are read exactly. Unknown fields are errors.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fde/reduce.hpp"

namespace fde {

enum class ProblemKind { MultiTerm, MultiOrder, SingleTerm };

struct Problem {
  ProblemKind kind = ProblemKind::MultiTerm;
  std::optional<MultiTermProblem> multi_term;
  /// multi_order problems, and single_term problems viewed as multi-order.
  std::optional<MultiOrderSystem> multi_order;
  std::optional<double> h;
  std::optional<double> t_end;
  std::string source;  // file name or "<string>"
};

/// Throws std::invalid_argument (ParseError for bad expressions, with the
/// JSON location in the message) on any schema violation.
Problem parse_problem(std::string_view json_text, const std::string& source = "<string>");
Problem load_problem(const std::string& path);

}  // namespace fde
