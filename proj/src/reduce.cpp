#include "fde/reduce.hpp"

#include <algorithm>
#include <charconv>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace fde {

namespace {

// Shortest text that reads back to the same double.
std::string num_text(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string row_text(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::string s = "[";
  for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? ", " : "") + num_text(m(r, c));
  return s + "]";
}

std::string vec_text(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num_text(v[i]);
  return s + ")";
}

}  // namespace

bool LinearSystem::homogeneous() const {
  return std::none_of(forcing.begin(), forcing.end(), [](const Forcing& f) { return static_cast<bool>(f); });
}

double MultiTermProblem::eval(double t, std::span<const double> args) const {
  if (linear) {
    double s = linear->forcing ? linear->forcing(t) : 0.0;
    for (std::size_t j = 0; j < args.size(); ++j) s += linear->coeffs[j] * args[j];
    return s;
  }
  return rhs(t, args);
}

void MultiTermProblem::validate() const {
  if (!(a < b)) throw std::invalid_argument("interval must satisfy a < b");
  if (orders.empty()) throw std::invalid_argument("multi-term problem needs at least one order");
  if (!(orders.front() > Order(0)) || orders.front() > Order(1))
    throw std::invalid_argument("lowest order must lie in (0, 1]");
  for (std::size_t j = 1; j < orders.size(); ++j)
    if (!(orders[j - 1] < orders[j])) throw std::invalid_argument("orders must be strictly increasing");
  const auto need = static_cast<std::size_t>(orders.back().ceil());
  if (initial.size() != need)
    throw std::invalid_argument("leading order " + orders.back().str() + " needs " + std::to_string(need) +
                                " initial values, got " + std::to_string(initial.size()));
  if (linear) {
    if (linear->coeffs.size() != orders.size())
      throw std::invalid_argument("linear form needs one coefficient per argument (x and each lower derivative)");
  } else if (!rhs) {
    throw std::invalid_argument("multi-term problem has no right-hand side");
  }
}

void MultiOrderSystem::eval(double t, std::span<const double> x, std::span<double> out) const {
  if (linear) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    Eigen::Map<Eigen::VectorXd> ov(out.data(), n);
    ov.noalias() = linear->matrix * xv;
    for (std::size_t i = 0; i < linear->forcing.size(); ++i)
      if (linear->forcing[i]) out[i] += linear->forcing[i](t);
    return;
  }
  rhs(t, x, out);
}

void MultiOrderSystem::validate() const {
  if (!(a < b)) throw std::invalid_argument("interval must satisfy a < b");
  const std::size_t n = orders.size();
  if (n == 0) throw std::invalid_argument("multi-order system needs at least one component");
  for (const auto& o : orders)
    if (!(o > Order(0)) || o > Order(1)) throw std::invalid_argument("component orders must lie in (0, 1]");
  if (initial.size() != n) throw std::invalid_argument("initial vector size must equal the dimension");
  if (!labels.empty() && labels.size() != n) throw std::invalid_argument("one label per component");
  if (linear) {
    const auto d = static_cast<Eigen::Index>(n);
    if (linear->matrix.rows() != d || linear->matrix.cols() != d)
      throw std::invalid_argument("system matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!linear->forcing.empty() && linear->forcing.size() != n)
      throw std::invalid_argument("forcing needs one entry per component");
  } else if (!rhs) {
    throw std::invalid_argument("multi-order system has no right-hand side");
  }
}

// ---------------------------------------------------------------------------

MultiTermProblem normalize_orders(const MultiTermProblem& p) {
  p.validate();
  std::vector<Order> orders = p.orders;
  for (std::int64_t l = p.orders.front().floor() + 1; Order(l) < p.orders.back(); ++l) {
    if (!(Order(l) > p.orders.front())) continue;
    if (std::none_of(orders.begin(), orders.end(), [&](const Order& o) { return o == Order(l); })) orders.push_back(l);
  }
  if (orders.size() == p.orders.size()) return p;
  std::sort(orders.begin(), orders.end(), [](const Order& x, const Order& y) { return x < y; });

  // keep[j]: position in the new argument list of old argument j.
  std::vector<std::size_t> keep{0};
  for (std::size_t j = 0; j + 1 < p.orders.size(); ++j) {
    const auto it = std::find(orders.begin(), orders.end(), p.orders[j]);
    keep.push_back(static_cast<std::size_t>(it - orders.begin()) + 1);
  }

  MultiTermProblem q = p;
  q.orders = orders;
  if (p.linear) {
    q.linear->coeffs.assign(orders.size(), 0.0);
    for (std::size_t j = 0; j < keep.size(); ++j) q.linear->coeffs[keep[j]] = p.linear->coeffs[j];
  } else {
    q.rhs = [inner = p.rhs, keep](double t, std::span<const double> args) {
      std::vector<double> old(keep.size());
      for (std::size_t j = 0; j < keep.size(); ++j) old[j] = args[keep[j]];
      return inner(t, old);
    };
  }
  return q;
}

SingleTermSystem reduce_to_single_term(const MultiTermProblem& p, std::optional<Order> base,
                                       std::size_t max_dimension) {
  p.validate();
  const std::size_t k = p.orders.size();
  Order gamma;
  if (base) {
    gamma = *base;
  } else if (k == 1 && p.orders.front() <= Order(1)) {
    gamma = p.orders.front();
  } else {
    std::vector<Rational> exact;
    for (const auto& o : p.orders) {
      if (!o.is_exact())
        throw std::invalid_argument("order " + o.str() + " is not rational; single-term reduction needs rational orders");
      exact.push_back(*o.exact());
    }
    gamma = Order(Rational(1, lcm_denominators(exact)));
  }
  if (!(gamma > Order(0))) throw std::invalid_argument("base order must be positive");

  auto index_of = [&](const Order& o) -> std::size_t {
    if (o.is_exact() && gamma.is_exact()) {
      const Rational q = *o.exact() / *gamma.exact();
      if (q.is_integer()) return static_cast<std::size_t>(q.num());
    } else if (std::abs(o.value() / gamma.value() - std::round(o.value() / gamma.value())) <= 1e-9) {
      return static_cast<std::size_t>(std::llround(o.value() / gamma.value()));
    }
    throw std::invalid_argument("order " + o.str() + " is not a multiple of the base order " + gamma.str());
  };

  // Dimension check before allocating anything of that size.
  if (p.orders.back().value() / gamma.value() > static_cast<double>(max_dimension) + 0.5)
    throw std::invalid_argument("reduced dimension exceeds the cap of " + std::to_string(max_dimension));
  const std::size_t n = index_of(p.orders.back());
  if (n > max_dimension)
    throw std::invalid_argument("reduced dimension " + std::to_string(n) + " exceeds the cap of " +
                                std::to_string(max_dimension));

  SingleTermSystem st;
  st.gamma = gamma;
  st.rhs_arguments.push_back(0);
  for (std::size_t j = 0; j + 1 < k; ++j) st.rhs_arguments.push_back(index_of(p.orders[j]));

  MultiOrderSystem& sys = st.system;
  sys.a = p.a;
  sys.b = p.b;
  sys.orders.assign(n, gamma);
  sys.initial.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const Order cum = gamma.is_exact() ? Order(*gamma.exact() * Rational(static_cast<std::int64_t>(j)))
                                       : Order::real(gamma.value() * static_cast<double>(j));
    st.cumulative_orders.push_back(cum);
    st.source_component.push_back(0);
    if (cum.is_integer()) sys.initial[j] = p.initial[static_cast<std::size_t>(cum.as_integer())];
    sys.labels.push_back(j == 0 ? "x" : "D^" + cum.str() + " x");
  }

  if (p.linear) {
    LinearSystem lin;
    const auto d = static_cast<Eigen::Index>(n);
    lin.matrix = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j + 1 < d; ++j) lin.matrix(j, j + 1) = 1.0;
    for (std::size_t j = 0; j < k; ++j)
      lin.matrix(d - 1, static_cast<Eigen::Index>(st.rhs_arguments[j])) += p.linear->coeffs[j];
    if (p.linear->forcing) {
      lin.forcing.resize(n);
      lin.forcing.back() = p.linear->forcing;
    }
    sys.linear = std::move(lin);
  } else {
    sys.rhs = [f = p.rhs, idx = st.rhs_arguments](double t, std::span<const double> y, std::span<double> out) {
      const std::size_t last = y.size() - 1;
      for (std::size_t j = 0; j < last; ++j) out[j] = y[j + 1];
      std::vector<double> args(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) args[j] = y[idx[j]];
      out[last] = f(t, args);
    };
  }
  sys.validate();
  return st;
}

MultiOrderSystem reduce_to_multi_order(const MultiTermProblem& input) {
  const MultiTermProblem p = normalize_orders(input);
  const std::size_t k = p.orders.size();

  MultiOrderSystem sys;
  sys.a = p.a;
  sys.b = p.b;
  sys.orders.push_back(p.orders.front());
  for (std::size_t j = 1; j < k; ++j) {
    const Order beta = p.orders[j] - p.orders[j - 1];
    if (beta > Order(1)) throw std::invalid_argument("order gap above 1 remains after normalization");
    sys.orders.push_back(beta);
  }
  sys.initial.assign(k, 0.0);
  sys.initial[0] = p.initial[0];
  sys.labels.push_back("x");
  for (std::size_t j = 1; j < k; ++j) {
    const Order& prev = p.orders[j - 1];
    if (prev.is_integer()) sys.initial[j] = p.initial[static_cast<std::size_t>(prev.as_integer())];
    sys.labels.push_back("D^" + prev.str() + " x");
  }

  if (p.linear) {
    LinearSystem lin;
    const auto d = static_cast<Eigen::Index>(k);
    lin.matrix = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j + 1 < d; ++j) lin.matrix(j, j + 1) = 1.0;
    for (std::size_t j = 0; j < k; ++j) lin.matrix(d - 1, static_cast<Eigen::Index>(j)) = p.linear->coeffs[j];
    if (p.linear->forcing) {
      lin.forcing.resize(k);
      lin.forcing.back() = p.linear->forcing;
    }
    sys.linear = std::move(lin);
  } else {
    sys.rhs = [f = p.rhs](double t, std::span<const double> x, std::span<double> out) {
      const std::size_t last = x.size() - 1;
      for (std::size_t j = 0; j < last; ++j) out[j] = x[j + 1];
      out[last] = f(t, x);
    };
  }
  sys.validate();
  return sys;
}

SingleTermSystem reduce_multiorder_to_single(const MultiOrderSystem& s, std::size_t max_dimension) {
  s.validate();
  const auto base = is_commensurate(std::span<const Order>(s.orders));
  if (!base) throw std::invalid_argument("component orders are not commensurate");
  const Order gamma = *base;

  std::vector<std::size_t> mult;
  std::size_t n = 0;
  for (const auto& o : s.orders) {
    std::size_t m = 1;
    if (o.is_exact() && gamma.is_exact())
      m = static_cast<std::size_t>((*o.exact() / *gamma.exact()).num());
    else
      m = static_cast<std::size_t>(std::llround(o.value() / gamma.value()));
    mult.push_back(m);
    n += m;
    if (n > max_dimension)
      throw std::invalid_argument("expanded dimension exceeds the cap of " + std::to_string(max_dimension));
  }

  std::vector<std::size_t> start;  // first variable of each component
  SingleTermSystem st;
  st.gamma = gamma;
  MultiOrderSystem& sys = st.system;
  sys.a = s.a;
  sys.b = s.b;
  sys.orders.assign(n, gamma);
  sys.initial.assign(n, 0.0);
  for (std::size_t i = 0, pos = 0; i < s.orders.size(); ++i) {
    start.push_back(pos);
    const std::string name = s.labels.empty() ? "x" + std::to_string(i + 1) : s.labels[i];
    for (std::size_t r = 0; r < mult[i]; ++r, ++pos) {
      const Order cum = gamma.is_exact() ? Order(*gamma.exact() * Rational(static_cast<std::int64_t>(r)))
                                         : Order::real(gamma.value() * static_cast<double>(r));
      st.cumulative_orders.push_back(cum);
      st.source_component.push_back(i);
      sys.labels.push_back(r == 0 ? name : "D^" + cum.str() + " " + name);
    }
    sys.initial[start[i]] = s.initial[i];
  }

  if (s.linear) {
    LinearSystem lin;
    const auto d = static_cast<Eigen::Index>(n);
    lin.matrix = Eigen::MatrixXd::Zero(d, d);
    if (!s.linear->forcing.empty()) lin.forcing.resize(n);
    for (std::size_t i = 0; i < s.orders.size(); ++i) {
      const auto first = static_cast<Eigen::Index>(start[i]);
      const auto last = first + static_cast<Eigen::Index>(mult[i]) - 1;
      for (Eigen::Index r = first; r < last; ++r) lin.matrix(r, r + 1) = 1.0;
      for (std::size_t l = 0; l < s.orders.size(); ++l)
        lin.matrix(last, static_cast<Eigen::Index>(start[l])) +=
            s.linear->matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
      if (!s.linear->forcing.empty()) lin.forcing[static_cast<std::size_t>(last)] = s.linear->forcing[i];
    }
    sys.linear = std::move(lin);
  } else {
    sys.rhs = [g = s.rhs, start, mult](double t, std::span<const double> y, std::span<double> out) {
      std::vector<double> x(start.size());
      std::vector<double> gx(start.size());
      for (std::size_t i = 0; i < start.size(); ++i) x[i] = y[start[i]];
      g(t, x, gx);
      for (std::size_t i = 0; i < start.size(); ++i) {
        const std::size_t last = start[i] + mult[i] - 1;
        for (std::size_t r = start[i]; r < last; ++r) out[r] = y[r + 1];
        out[last] = gx[i];
      }
    };
  }
  sys.validate();
  return st;
}

// --- reports ----------------------------------------------------------------

namespace {

const char* kMultiOrderRule =
    "x_1(a) = x_a^(0); x_j(a) = x_a^(alpha_{j-1}) if alpha_{j-1} is an integer, else 0";
const char* kSingleTermRule = "y_j(a) = x_a^(j*gamma) if j*gamma is an integer, else 0";

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string render_report(const SingleTermSystem& s) {
  std::ostringstream os;
  const auto& sys = s.system;
  os << "single-term system: gamma=" << s.gamma.str() << " N=" << s.dimension() << "\n";
  os << "index map:\n";
  for (std::size_t j = 0; j < s.dimension(); ++j)
    os << "  y" << j + 1 << " = " << sys.labels[j] << "    y" << j + 1 << "(a) = " << num_text(sys.initial[j]) << "\n";
  os << "initial rule: " << kSingleTermRule << "\n";
  os << "initial vector: " << vec_text(sys.initial) << "\n";
  if (sys.linear) {
    os << "matrix:\n";
    for (Eigen::Index r = 0; r < sys.linear->matrix.rows(); ++r) os << "  " << row_text(sys.linear->matrix, r) << "\n";
    os << "forcing: " << (sys.linear->homogeneous() ? "none" : "present") << "\n";
  } else {
    os << "rhs: nonlinear\n";
  }
  return os.str();
}

std::string render_report(const MultiOrderSystem& s) {
  std::ostringstream os;
  os << "multi-order system: k=" << s.dimension() << " beta=(";
  for (std::size_t i = 0; i < s.dimension(); ++i) os << (i ? ", " : "") << s.orders[i].str();
  os << ")\n";
  os << "index map:\n";
  for (std::size_t i = 0; i < s.dimension(); ++i)
    os << "  x" << i + 1 << " = " << (s.labels.empty() ? "x" + std::to_string(i + 1) : s.labels[i]) << "    x" << i + 1
       << "(a) = " << num_text(s.initial[i]) << "\n";
  os << "initial rule: " << kMultiOrderRule << "\n";
  os << "initial vector: " << vec_text(s.initial) << "\n";
  if (s.linear) {
    os << "matrix:\n";
    for (Eigen::Index r = 0; r < s.linear->matrix.rows(); ++r) os << "  " << row_text(s.linear->matrix, r) << "\n";
    os << "forcing: " << (s.linear->homogeneous() ? "none" : "present") << "\n";
  } else {
    os << "rhs: nonlinear\n";
  }
  return os.str();
}

std::string report_json(const SingleTermSystem& s) {
  nlohmann::json j;
  j["kind"] = "single_term";
  j["gamma"] = s.gamma.str();
  j["N"] = s.dimension();
  nlohmann::json idx = nlohmann::json::array();
  for (std::size_t i = 0; i < s.dimension(); ++i)
    idx.push_back({{"variable", "y" + std::to_string(i + 1)},
                   {"meaning", s.system.labels[i]},
                   {"component", s.source_component[i] + 1},
                   {"cumulative_order", s.cumulative_orders[i].str()}});
  j["index_map"] = idx;
  j["initial"] = s.system.initial;
  j["initial_rule"] = kSingleTermRule;
  if (s.system.linear) j["matrix"] = matrix_json(s.system.linear->matrix);
  return j.dump(2);
}

std::string report_json(const MultiOrderSystem& s) {
  nlohmann::json j;
  j["kind"] = "multi_order";
  nlohmann::json beta = nlohmann::json::array();
  for (const auto& o : s.orders) beta.push_back(o.str());
  j["beta"] = beta;
  j["labels"] = s.labels;
  j["initial"] = s.initial;
  j["initial_rule"] = kMultiOrderRule;
  if (s.linear) j["matrix"] = matrix_json(s.linear->matrix);
  return j.dump(2);
}

}  // namespace fde
