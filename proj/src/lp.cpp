#include "remest/lp.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "remest/errors.hpp"

namespace remest::lp {

namespace {

using boost::multiprecision::cpp_int;

// Tableau with an explicit objective row holding z_j - c_j; optimal for
// maximization once every entry is >= 0.
struct Tableau {
  std::size_t num_rows = 0;
  std::size_t num_cols = 0;                 // variables, rhs excluded
  std::vector<std::vector<Rational>> rows;  // each num_cols + 1 wide
  std::vector<Rational> z_row;              // num_cols + 1 wide
  std::vector<std::size_t> basis;           // basic variable per row
  std::vector<bool> enterable;

  Rational& rhs(std::size_t r) { return rows[r][num_cols]; }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = rows[r];
    const Rational inv = Rational(1) / prow[c];
    for (auto& v : prow) v *= inv;
    for (std::size_t i = 0; i < num_rows; ++i) {
      if (i == r) continue;
      const Rational factor = rows[i][c];
      if (factor == 0) continue;
      for (std::size_t j = 0; j <= num_cols; ++j)
        rows[i][j] -= factor * prow[j];
    }
    const Rational zfactor = z_row[c];
    if (zfactor != 0)
      for (std::size_t j = 0; j <= num_cols; ++j)
        z_row[j] -= zfactor * prow[j];
    basis[r] = c;
  }

  // Rebuilds the objective row for cost vector c (maximization).
  void load_objective(const std::vector<Rational>& costs) {
    z_row.assign(num_cols + 1, Rational(0));
    for (std::size_t j = 0; j < costs.size(); ++j) z_row[j] = -costs[j];
    for (std::size_t r = 0; r < num_rows; ++r) {
      const std::size_t b = basis[r];
      if (b < costs.size() && costs[b] != 0) {
        const Rational cb = costs[b];
        for (std::size_t j = 0; j <= num_cols; ++j)
          z_row[j] += cb * rows[r][j];
      }
    }
  }

  // Bland's rule iteration. Returns optimal or unbounded.
  Status run() {
    for (;;) {
      std::size_t entering = num_cols;
      for (std::size_t j = 0; j < num_cols; ++j) {
        if (enterable[j] && z_row[j] < 0) {
          entering = j;
          break;
        }
      }
      if (entering == num_cols) return Status::optimal;
      std::size_t leaving = num_rows;
      Rational best_ratio;
      for (std::size_t r = 0; r < num_rows; ++r) {
        if (rows[r][entering] <= 0) continue;
        const Rational ratio = rows[r][num_cols] / rows[r][entering];
        if (leaving == num_rows || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
      if (leaving == num_rows) return Status::unbounded;
      pivot(leaving, entering);
    }
  }
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.num_vars;
  if (problem.objective.size() != n)
    throw ConfigError("objective length does not match num_vars");
  for (const Row& row : problem.rows)
    if (row.coeffs.size() != n)
      throw ConfigError("constraint length does not match num_vars");

  const std::size_t m = problem.rows.size();
  // Column layout: structural | slack/surplus (one per inequality) |
  // artificial (one per ge/eq row).
  std::size_t num_slack = 0, num_art = 0;
  for (const Row& row : problem.rows) {
    const bool rhs_neg = row.rhs < 0;
    RowKind kind = row.kind;
    if (rhs_neg && kind != RowKind::eq)
      kind = kind == RowKind::le ? RowKind::ge : RowKind::le;
    if (row.kind != RowKind::eq) ++num_slack;
    if (kind != RowKind::le) ++num_art;
  }
  Tableau t;
  t.num_rows = m;
  t.num_cols = n + num_slack + num_art;
  t.rows.assign(m, std::vector<Rational>(t.num_cols + 1, Rational(0)));
  t.basis.assign(m, 0);
  t.enterable.assign(t.num_cols, true);

  std::size_t slack_at = n;
  std::size_t art_at = n + num_slack;
  const std::size_t first_art = art_at;
  std::vector<Rational> phase1(t.num_cols, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    const Row& row = problem.rows[r];
    const bool flip = row.rhs < 0;
    for (std::size_t j = 0; j < n; ++j)
      t.rows[r][j] = flip ? -row.coeffs[j] : row.coeffs[j];
    t.rhs(r) = flip ? -row.rhs : row.rhs;
    RowKind kind = row.kind;
    if (flip && kind != RowKind::eq)
      kind = kind == RowKind::le ? RowKind::ge : RowKind::le;
    if (row.kind != RowKind::eq) {
      // slack (+1) for le, surplus (-1) for ge
      t.rows[r][slack_at] = kind == RowKind::le ? 1 : -1;
      if (kind == RowKind::le) t.basis[r] = slack_at;
      ++slack_at;
    }
    if (kind != RowKind::le) {
      t.rows[r][art_at] = 1;
      t.basis[r] = art_at;
      phase1[art_at] = -1;
      ++art_at;
    }
  }

  Solution out;
  if (num_art > 0) {
    t.load_objective(phase1);
    if (t.run() == Status::unbounded)
      throw NumericError("phase-1 simplex reported unbounded");
    if (t.z_row[t.num_cols] != 0) {
      out.status = Status::infeasible;
      return out;
    }
    // Pivot any degenerate artificial out of the basis; a row with no
    // non-artificial coefficient is redundant and can stay (its rhs is
    // zero and the artificial column gets frozen below).
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis[r] < first_art) continue;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (t.rows[r][j] != 0) {
          t.pivot(r, j);
          break;
        }
      }
    }
    for (std::size_t j = first_art; j < t.num_cols; ++j)
      t.enterable[j] = false;
  }

  std::vector<Rational> costs(t.num_cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) costs[j] = problem.objective[j];
  t.load_objective(costs);
  const Status status = t.run();
  if (status == Status::unbounded) {
    out.status = Status::unbounded;
    return out;
  }
  out.status = Status::optimal;
  out.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < m; ++r)
    if (t.basis[r] < n) out.x[t.basis[r]] = t.rhs(r);
  out.objective = t.z_row[t.num_cols];
  return out;
}

Rational rational_from_decimal(double value, int digits) {
  if (!std::isfinite(value))
    throw NumericError("cannot convert a non-finite value to a rational");
  if (digits < 0 || digits > 17)
    throw ConfigError("decimal digit count must lie in [0, 17]");
  cpp_int denom = 1;
  for (int k = 0; k < digits; ++k) denom *= 10;
  const double scaled = value * std::pow(10.0, digits);
  if (std::abs(scaled) >= 9.0e18)
    throw NumericError("value too large for exact decimal rounding");
  const auto
      numer = static_cast<long long>(std::llround(scaled));
  return Rational(cpp_int(numer), denom);
}

double to_double(const Rational& value) {
  return value.convert_to<double>();
}

}  // namespace remest::lp
