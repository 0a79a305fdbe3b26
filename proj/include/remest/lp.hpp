#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <vector>

namespace remest::lp {

using Rational = boost::multiprecision::cpp_rational;

enum class RowKind { le, ge, eq };

struct Row {
  std::vector<Rational> coeffs;
  RowKind kind = RowKind::le;
  Rational rhs;
};

// maximize objective . x  subject to rows, x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  std::vector<Row> rows;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  std::vector<Rational> x;
  Rational objective;
};

// Dense two-phase primal simplex over exact rationals, Bland's rule
// (anti-cycling, guaranteed termination). Intended for small systems;
// every arithmetic step is exact, so an optimal result is a
// certificate.
Solution solve(const Problem& problem);

// Nearest rational with the given number of decimal digits,
// round-half-away-from-zero.
Rational rational_from_decimal(double value, int digits = 12);

double to_double(const Rational& value);

}  // namespace remest::lp
