#pragma once

#include "nsring/rational.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nsring {

/// One coefficient of a sparse row, stored as a reduced int64 fraction.
struct Term {
  std::uint32_t index = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational value() const;
  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

/// Sorted by index, no zero entries.
using SparseRow = std::vector<Term>;

/// Reduces num/den, checks the int64 range and builds a term.
Term make_term(std::uint32_t index, const Rational& value);

struct Row {
  SparseRow terms;
  Rational rhs;
};

/// maximize c.x subject to A x = b, x >= 0. All rows are equalities.
struct RationalLP {
  std::vector<std::string> variables;
  SparseRow objective;
  std::vector<Row> rows;
  /// Row holding sum(weights * x) = 1 when the LP encodes a distribution.
  std::optional<std::size_t> normalization_row;

  std::size_t num_variables() const { return variables.size(); }
  std::size_t num_rows() const { return rows.size(); }
  /// Throws std::invalid_argument on unsorted rows, zeros, bad indices.
  void validate() const;
};

/// Primal and dual solutions with a claimed common objective. The dual is
/// the free vector y of min b.y subject to A^T y >= c.
struct Certificate {
  std::vector<Rational> primal;
  std::vector<Rational> dual;
  Rational objective;
};

struct VerifyResult {
  enum class Kind {
    Accepted,
    ShapeMismatch,
    NegativePrimal,       // index = column
    PrimalRowViolated,    // index = row
    DualColumnViolated,   // index = column
    PrimalObjectiveMismatch,
    DualObjectiveMismatch,
  };
  Kind kind = Kind::Accepted;
  std::size_t index = 0;
  std::string message;

  bool accepted() const { return kind == Kind::Accepted; }
};

/// Exact check of primal feasibility, dual feasibility and objective
/// equality; the first violation found is reported.
VerifyResult verify_certificate(const RationalLP& lp, const Certificate& cert);

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct SolveStats {
  std::size_t selected_rows = 0;
  std::size_t iterations = 0;
  std::string path;  // which pipeline produced the certificate
};

struct SolveResult {
  SolveStatus status = SolveStatus::Optimal;
  Certificate certificate;
  SolveStats stats;
  std::string message;
};

/// Observer for primal iterates of the exact simplex (phase two only, where
/// every iterate is primal feasible), starting with the initial feasible
/// vertex. Receives the dense primal vector.
using IterateObserver = std::function<void(const std::vector<Rational>& primal)>;

struct ExactOptions {
  /// Basic columns to start phase two from, e.g. from a float solve. The
  /// basis is checked for nonsingularity and primal feasibility and
  /// ignored when unusable.
  std::vector<std::size_t> warm_start;
  /// Dantzig pricing switches to Bland's rule after this many consecutive
  /// degenerate pivots; 0 means Bland's rule throughout.
  std::size_t degenerate_switch = 50;
  IterateObserver observer;
};

/// Deterministic exact revised simplex: rows are first reduced to a
/// linearly independent subset, then a two-phase simplex with artificial
/// variables runs in GMP rationals. The certificate is checked against the
/// full row set before it is returned.
SolveResult solve_exact(const RationalLP& lp, const ExactOptions& options = {});

struct PresolveOptions {
  double float_tolerance = 1e-9;
  /// Largest denominator tried when rounding float solutions; bounds are
  /// escalated through 10^3, 10^6, 10^9, ... up to this value.
  Integer max_denominator = Integer("1000000000");
  /// Exact simplex from the float basis when rounding fails.
  bool exact_fallback = true;
};

/// Solves in double precision, rounds primal and dual by continued
/// fractions with escalating denominator bounds until the exact check
/// accepts, then falls back to an exact solve. The exact fallback first
/// solves the float basis exactly (modular lifting) and, if that basis is
/// not optimal, continues with the exact simplex.
SolveResult solve_via_presolve(const RationalLP& lp, const PresolveOptions& options = {});

/// Indices of a maximal linearly independent subset of the rows, chosen
/// greedily in row order (the normalization row first) by elimination
/// modulo a 61-bit prime. Independence modulo p implies independence over
/// the rationals.
std::vector<std::size_t> select_independent_rows(const RationalLP& lp);

// JSON formats. LP:
//   {"variables":[labels], "objective":[[idx,"num/den"],...],
//    "rows":[{"rhs":"num/den","terms":[[idx,"num/den"],...]},...]}
// plus an optional "normalization_row" index. Certificate:
//   {"primal":[[idx,"num/den"],...], "dual":[[row,"num/den"],...],
//    "objective":"num/den"}
// Only nonzero primal/dual entries are written. Output is byte-stable.
void write_lp_json(std::ostream& out, const RationalLP& lp);
RationalLP read_lp_json(std::istream& in);
void write_certificate_json(std::ostream& out, const Certificate& cert);
Certificate read_certificate_json(std::istream& in, const RationalLP& lp);

}  // namespace nsring
