#include "fde/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fde/error.hpp"
#include "fde/powcalc.hpp"
#include "fde/problem.hpp"
#include "fde/reduce.hpp"
#include "fde/solve.hpp"
#include "fde/specfun.hpp"
#include "fde/stability.hpp"

namespace fde {

std::string polynomial_text(std::span<const double> c, const std::string& var) {
  const std::size_t n = c.empty() ? 0 : c.size() - 1;
  std::string out;
  char buf[40];  // shortest text that reads back to the same double
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0.0) continue;
    const std::size_t power = n - i;
    const double mag = std::abs(c[i]);
    if (out.empty())
      out += c[i] < 0 ? "-" : "";
    else
      out += c[i] < 0 ? " - " : " + ";
    std::string mono;
    if (power > 0) mono = power == 1 ? var : var + "^" + std::to_string(power);
    if (mag != 1.0 || power == 0) {
      const auto res = std::to_chars(buf, buf + sizeof buf, mag);
      out.append(buf, res.ptr);
      if (!mono.empty()) out += "*";
    }
    out += mono;
  }
  return out.empty() ? "0" : out;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Order order_arg(const std::string& text, const char* flag) {
  try {
    return Order(parse_order(text));
  } catch (const std::exception& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

void print_char_poly(std::ostream& out, const Eigen::MatrixXd& m) {
  if (m.rows() > static_cast<Eigen::Index>(kMaxPolyDimension)) return;
  const auto c = characteristic_polynomial(m);
  out << "characteristic polynomial: " << polynomial_text(c) << "\n";
}

int cmd_reduce(const std::string& file, bool as_json, std::ostream& out) {
  const Problem p = load_problem(file);
  std::vector<std::string> json_parts;
  auto emit_single = [&](const SingleTermSystem& s) {
    if (as_json) {
      json_parts.push_back(report_json(s));
      return;
    }
    out << render_report(s);
    if (s.system.linear) print_char_poly(out, s.system.linear->matrix);
  };
  auto emit_multi = [&](const MultiOrderSystem& s) {
    if (as_json) {
      json_parts.push_back(report_json(s));
      return;
    }
    out << render_report(s);
  };

  switch (p.kind) {
    case ProblemKind::MultiTerm: {
      const auto& mt = *p.multi_term;
      const MultiTermProblem norm = normalize_orders(mt);
      if (!as_json && norm.orders.size() != mt.orders.size()) {
        out << "normalized orders:";
        for (const auto& o : norm.orders) out << " " << o.str();
        out << "\n";
      }
      emit_single(reduce_to_single_term(mt));
      if (!as_json) out << "\n";
      emit_multi(reduce_to_multi_order(mt));
      break;
    }
    case ProblemKind::MultiOrder:
      emit_multi(*p.multi_order);
      if (!as_json) out << "\n";
      emit_single(reduce_multiorder_to_single(*p.multi_order));
      break;
    case ProblemKind::SingleTerm:
      emit_single(reduce_multiorder_to_single(*p.multi_order));
      break;
  }
  if (as_json) {
    out << "[";
    for (std::size_t i = 0; i < json_parts.size(); ++i) out << (i ? ",\n" : "\n") << json_parts[i];
    out << "\n]\n";
  }
  return 0;
}

int cmd_solve(const std::string& file, std::optional<double> h, std::optional<double> t_end,
              const std::string& csv, const std::string& route, int correctors, std::ostream& out) {
  const Problem p = load_problem(file);
  const double step = h ? *h : p.h.value_or(0.0);
  if (!(step > 0)) throw UsageError("no step size: pass --h or set solver.h in the problem file");
  const double end = t_end ? *t_end : p.t_end.value_or(p.multi_term ? p.multi_term->b : p.multi_order->b);

  Trajectory tr;
  std::string used = route;
  if (p.kind == ProblemKind::MultiTerm) {
    if (used.empty()) used = "single";
    if (used == "single")
      tr = solve_single_term(reduce_to_single_term(*p.multi_term), end, step, correctors);
    else {
      tr = solve_multi_order(reduce_to_multi_order(*p.multi_term), end, step, correctors);
      tr.set_meta("reduction", "multi-order");
    }
  } else {
    if (used.empty()) used = p.kind == ProblemKind::SingleTerm ? "single" : "multi";
    if (used == "single")
      tr = solve_single_term(reduce_multiorder_to_single(*p.multi_order), end, step, correctors);
    else {
      tr = solve_multi_order(*p.multi_order, end, step, correctors);
      tr.set_meta("reduction", "none");
    }
  }
  tr.set_meta("problem", file);

  if (csv.empty()) {
    write_csv(out, tr);
    return 0;
  }
  std::ofstream f(csv);
  if (!f) throw std::runtime_error("cannot write '" + csv + "'");
  write_csv(f, tr);
  if (!f) throw std::runtime_error("write to '" + csv + "' failed");
  out << "wrote " << tr.nodes() << " rows to " << csv << "\n";
  return 0;
}

int cmd_stability(const std::string& file, double band, std::ostream& out) {
  const Problem p = load_problem(file);
  StabilityReport r;
  if (p.kind == ProblemKind::MultiTerm) {
    const auto& mt = *p.multi_term;
    if (!mt.linear || mt.linear->forcing) throw std::invalid_argument("stability needs a homogeneous linear problem");
    const SingleTermSystem st = reduce_to_single_term(mt);
    r = assess_stability(st.gamma, st.system.linear->matrix, band);
  } else {
    r = assess_stability(*p.multi_order, band);
  }
  out << render(r);
  return 0;
}

int cmd_ml(double alpha, double beta, double z, double zi, int digits, std::ostream& out) {
  char buf[80];
  if (zi == 0.0) {
    std::snprintf(buf, sizeof buf, "%.*g\n", digits, mittag_leffler({alpha, beta, z}));
  } else {
    const auto v = mittag_leffler(alpha, beta, {z, zi});
    std::snprintf(buf, sizeof buf, "%.*g %.*g\n", digits, v.real(), digits, v.imag());
  }
  out << buf;
  return 0;
}

int cmd_verify(const std::string& mode_text, const std::string& f_text, const std::string& beta_text,
               const std::string& gamma_text, const std::string& alpha_text, std::ostream& out) {
  SemigroupMode mode;
  if (mode_text == "rl")
    mode = SemigroupMode::RiemannLiouville;
  else if (mode_text == "caputo")
    mode = SemigroupMode::Caputo;
  else
    mode = SemigroupMode::IntegerSplit;
  const PowerSum f = PowerSum::parse(f_text);
  const Order beta = order_arg(beta_text, "--beta");
  const Order gam = order_arg(gamma_text, "--gamma");
  std::optional<Order> alpha;
  if (!alpha_text.empty()) alpha = order_arg(alpha_text, "--alpha");
  out << "f = " << f.str() << "\n";
  out << render(check_semigroup(f, beta, gam, mode, alpha));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional differential equation toolkit", "fdetool"};
  app.require_subcommand(1);
  std::string seed;
  app.add_option("--seed", seed, "Reserved; rejected (every computation is deterministic)");

  std::string file;
  bool as_json = false;
  auto* reduce = app.add_subcommand("reduce", "Print the reductions of a problem file");
  reduce->add_option("file", file, "Problem file")->required();
  reduce->add_flag("--json", as_json, "Emit JSON");

  std::optional<double> h;
  std::optional<double> t_end;
  std::string csv;
  std::string route;
  int correctors = 1;
  auto* solve = app.add_subcommand("solve", "Solve a problem file numerically");
  solve->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  solve->add_option("file", file, "Problem file")->required();
  solve->add_option("--h", h, "Step size (overrides solver.h)");
  solve->add_option("--t-end", t_end, "End time (overrides solver.t_end)");
  solve->add_option("--csv", csv, "Write the trajectory here instead of stdout");
  solve->add_option("--route", route, "single: single-order chain; multi: multi-order system")
      ->check(CLI::IsMember({"single", "multi"}));
  solve->add_option("--correctors", correctors, "Corrector iterations")->check(CLI::Range(0, 100));

  double band = 1e-6;
  auto* stab = app.add_subcommand("stability", "Sector-condition stability of a linear problem");
  stab->add_option("file", file, "Problem file")->required();
  stab->add_option("--band", band, "Boundary band for |arg| comparisons")->check(CLI::NonNegativeNumber);

  double alpha = 1.0;
  double beta = 1.0;
  double z = 0.0;
  double zi = 0.0;
  int digits = 13;
  auto* ml = app.add_subcommand("ml", "Evaluate E_{alpha,beta}(z)");
  ml->add_option("--alpha", alpha, "alpha > 0")->required();
  ml->add_option("--beta", beta, "beta (default 1)");
  ml->add_option("--z", z, "Argument (real part)")->required();
  ml->add_option("--zi", zi, "Imaginary part of the argument");
  ml->add_option("--digits", digits, "Significant digits")->check(CLI::Range(1, 17));

  std::string mode = "caputo";
  std::string f_text;
  std::string beta_text;
  std::string gamma_text;
  std::string alpha_text;
  auto* verify = app.add_subcommand("verify", "Check a semigroup identity on a power sum");
  verify->add_option("--mode", mode, "rl, caputo or split")->check(CLI::IsMember({"rl", "caputo", "split"}));
  verify->add_option("--f", f_text, "Power sum, e.g. \"(t)^0.5\" or \"2*(t-1)^(3/2) + 1\"")->required();
  verify->add_option("--beta", beta_text, "Inner order (an integer l in split mode)")->required();
  verify->add_option("--gamma", gamma_text, "Outer order")->required();
  verify->add_option("--alpha", alpha_text, "Differentiability order for the hypotheses (default beta+gamma)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (!seed.empty() || app.count("--seed") > 0) {
    err << "error: --seed is reserved and not accepted; every computation is deterministic\n";
    return 2;
  }

  try {
    if (*reduce) return cmd_reduce(file, as_json, out);
    if (*solve) return cmd_solve(file, h, t_end, csv, route, correctors, out);
    if (*stab) return cmd_stability(file, band, out);
    if (*ml) return cmd_ml(alpha, beta, z, zi, digits, out);
    if (*verify) return cmd_verify(mode, f_text, beta_text, gamma_text, alpha_text, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"fdetool"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fde
