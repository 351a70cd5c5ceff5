#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fde {

/// Subcommands: reduce, solve, stability, ml, verify. Returns 0 on success,
/// 1 on domain/input errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: argv[0] is supplied.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "lambda^3 - lambda^2" for descending coefficients {1, -1, 0, 0}.
/// Coefficients use the shortest round-trip decimal form.
std::string polynomial_text(std::span<const double> coeffs, const std::string& var = "lambda");

}  // namespace fde
