#include "fde/problem.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fde/error.hpp"
#include "fde/expr.hpp"

namespace fde {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) fail(where, "unknown field '" + k + "'");
}

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "expected a finite number");
  return d;
}

Order order_at(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "orders must be strings such as \"3/2\" or \"0.5\"");
  try {
    return Order(parse_order(v.get<std::string>()));
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

ExprPtr expr_at(const json& v, const std::string& where, std::size_t x_count, std::size_t d_count) {
  if (!v.is_string()) fail(where, "expected an expression string");
  try {
    ExprPtr e = parse_expression(v.get<std::string>());
    check_bindings(*e, x_count, d_count);
    return e;
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what(), e.offset());
  }
}

std::vector<double> numbers_at(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::MatrixXd matrix_at(const json& v, std::size_t rows, std::size_t cols) {
  if (!v.is_array() || v.size() != rows)
    fail("matrix", "expected " + std::to_string(rows) + " row" + (rows == 1 ? "" : "s"));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = numbers_at(v[r], "matrix[" + std::to_string(r) + "]");
    if (row.size() != cols) fail("matrix[" + std::to_string(r) + "]", "expected " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

Forcing forcing_fn(const ExprPtr& e) {
  if (is_literal_zero(*e)) return {};
  return [e](double t) { return eval(*e, ExprEnv{t, {}, {}}); };
}

std::vector<Forcing> forcing_at(const json& doc, std::size_t rows) {
  std::vector<Forcing> out;
  if (!doc.contains("forcing")) return out;
  const json& f = doc["forcing"];
  if (!f.is_array() || f.size() != rows) fail("forcing", "expected " + std::to_string(rows) + " expressions");
  bool any = false;
  for (std::size_t i = 0; i < rows; ++i) {
    out.push_back(forcing_fn(expr_at(f[i], "forcing[" + std::to_string(i) + "]", 0, 0)));
    any = any || static_cast<bool>(out.back());
  }
  if (!any) out.clear();
  return out;
}

// Equation list: returns one rhs expression per expected order.
std::vector<ExprPtr> equations_at(const json& eqs, const std::vector<Order>& expected, std::size_t x_count,
                                  std::size_t d_count) {
  if (!eqs.is_array() || eqs.size() != expected.size())
    fail("equations", "expected " + std::to_string(expected.size()) + " equation" + (expected.size() == 1 ? "" : "s"));
  std::vector<ExprPtr> out;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string where = "equations[" + std::to_string(i) + "]";
    only_fields(eqs[i], where, {"order", "rhs"});
    if (!eqs[i].contains("rhs")) fail(where, "missing 'rhs'");
    if (eqs[i].contains("order")) {
      const Order o = order_at(eqs[i]["order"], where + ".order");
      if (!(o == expected[i])) fail(where + ".order", "expected " + expected[i].str() + ", got " + o.str());
    }
    out.push_back(expr_at(eqs[i]["rhs"], where + ".rhs", x_count, d_count));
  }
  return out;
}

}  // namespace

Problem parse_problem(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": invalid JSON: " + e.what(), e.byte == 0 ? 0 : e.byte - 1);
  }
  only_fields(doc, source, {"version", "kind", "interval", "orders", "equations", "matrix", "forcing", "initial", "solver"});
  for (const char* k : {"version", "kind", "interval", "orders", "initial"})
    if (!doc.contains(k)) fail(source, std::string("missing field '") + k + "'");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1) fail("version", "only version 1 is supported");

  Problem p;
  p.source = source;
  const json& kind = doc["kind"];
  if (kind == "multi_term")
    p.kind = ProblemKind::MultiTerm;
  else if (kind == "multi_order")
    p.kind = ProblemKind::MultiOrder;
  else if (kind == "single_term")
    p.kind = ProblemKind::SingleTerm;
  else
    fail("kind", "expected multi_term, multi_order or single_term");

  only_fields(doc["interval"], "interval", {"a", "b"});
  if (!doc["interval"].contains("a") || !doc["interval"].contains("b")) fail("interval", "needs 'a' and 'b'");
  const double a = number_at(doc["interval"]["a"], "interval.a");
  const double b = number_at(doc["interval"]["b"], "interval.b");
  if (!(a < b)) fail("interval", "a must be less than b");

  if (!doc["orders"].is_array() || doc["orders"].empty()) fail("orders", "expected a non-empty array");
  std::vector<Order> orders;
  for (std::size_t i = 0; i < doc["orders"].size(); ++i)
    orders.push_back(order_at(doc["orders"][i], "orders[" + std::to_string(i) + "]"));

  const std::vector<double> initial = numbers_at(doc["initial"], "initial");
  const bool has_eq = doc.contains("equations");
  const bool has_mat = doc.contains("matrix");
  if (has_eq == has_mat) fail(source, "give exactly one of 'equations' or 'matrix'");
  if (has_eq && doc.contains("forcing")) fail("forcing", "only allowed together with 'matrix'");

  if (doc.contains("solver")) {
    only_fields(doc["solver"], "solver", {"h", "t_end"});
    if (doc["solver"].contains("h")) {
      p.h = number_at(doc["solver"]["h"], "solver.h");
      if (!(*p.h > 0)) fail("solver.h", "must be positive");
    }
    if (doc["solver"].contains("t_end")) p.t_end = number_at(doc["solver"]["t_end"], "solver.t_end");
  }

  if (p.kind == ProblemKind::MultiTerm) {
    MultiTermProblem mt;
    mt.a = a;
    mt.b = b;
    mt.orders = orders;
    mt.initial = initial;
    const std::size_t k = orders.size();
    if (has_mat) {
      LinearForm lf;
      const Eigen::MatrixXd m = matrix_at(doc["matrix"], 1, k);
      for (std::size_t j = 0; j < k; ++j) lf.coeffs.push_back(m(0, static_cast<Eigen::Index>(j)));
      const auto f = forcing_at(doc, 1);
      if (!f.empty()) lf.forcing = f[0];
      mt.linear = std::move(lf);
    } else {
      const auto rhs = equations_at(doc["equations"], {orders.back()}, 1, k - 1);
      mt.rhs = [e = rhs[0]](double t, std::span<const double> args) {
        return eval(*e, ExprEnv{t, args.first(1), args.subspan(1)});
      };
    }
    try {
      mt.validate();
    } catch (const std::invalid_argument& e) {
      fail(source, e.what());
    }
    p.multi_term = std::move(mt);
    return p;
  }

  const std::size_t n = initial.size();
  if (n == 0) fail("initial", "needs one value per component");
  if (p.kind == ProblemKind::SingleTerm) {
    if (orders.size() == 1) orders.assign(n, orders[0]);
    for (const auto& o : orders)
      if (!(o == orders[0])) fail("orders", "a single_term problem has one common order");
  }
  if (orders.size() != n) fail("orders", "expected one order per component (" + std::to_string(n) + ")");

  MultiOrderSystem s;
  s.a = a;
  s.b = b;
  s.orders = orders;
  s.initial = initial;
  for (std::size_t i = 0; i < n; ++i) s.labels.push_back("x" + std::to_string(i + 1));
  if (has_mat) {
    LinearSystem lin;
    lin.matrix = matrix_at(doc["matrix"], n, n);
    lin.forcing = forcing_at(doc, n);
    s.linear = std::move(lin);
  } else {
    const auto rhs = equations_at(doc["equations"], orders, n, 0);
    s.rhs = [rhs](double t, std::span<const double> x, std::span<double> out) {
      for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = eval(*rhs[i], ExprEnv{t, x, {}});
    };
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    fail(source, e.what());
  }
  p.multi_order = std::move(s);
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), path);
}

}  // namespace fde
