#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tlfw::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<double> coeffs;
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// maximize objective . x  subject to rows, x >= 0.
struct Problem {
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<std::string> varNames;

  std::size_t num_vars() const { return objective.size(); }
  /// Appends a variable with the given objective coefficient and returns its index.
  std::size_t add_var(double cost, std::string name = {});
  /// Appends a row sized to the current variable count.
  Row& add_row(Relation rel, double rhs, std::string name = {});
  /// Throws InputError on ragged rows or non-finite numbers.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(Status status);

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> values;
  double objectiveValue = 0.0;
  std::size_t iterations = 0;
  /// Row duals for the maximization: >= 0 on <= rows, <= 0 on >= rows.
  std::vector<double> duals;
};

struct Options {
  double feasTol = 1e-9;
  double costTol = 1e-9;
  /// 0 selects 50 * (rows + cols).
  std::size_t maxIter = 0;
};

/// Two-phase dense-tableau simplex. Dantzig pricing with smallest-index ties,
/// switching to Bland's rule after 3 * (rows + cols) iterations.
Solution solve(const Problem& problem, const Options& options = {});

/// Keeps the tableau between solves so that columns and <= rows with a
/// nonnegative right-hand side can be appended and re-optimised from the last
/// optimal basis. Anything the basis cannot absorb triggers a cold solve.
class IncrementalSolver {
 public:
  struct Entry {
    /// Row index for columns, column index for rows.
    std::size_t row;
    double value;
  };

  explicit IncrementalSolver(Problem problem, Options options = {});
  ~IncrementalSolver();
  IncrementalSolver(const IncrementalSolver&) = delete;
  IncrementalSolver& operator=(const IncrementalSolver&) = delete;

  std::size_t add_column(double cost, std::span<const Entry> entries, std::string name = {});
  std::size_t add_row(Relation rel, double rhs, std::span<const Entry> entries,
                      std::string name = {});
  Solution solve();
  const Problem& problem() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Residuals {
  double maxViolation = 0.0;
  std::ptrdiff_t worstRow = -1;
  double maxNegativity = 0.0;
  std::ptrdiff_t worstVar = -1;
  double objectiveDelta = 0.0;

  bool within(double tol) const {
    return maxViolation <= tol && maxNegativity <= tol && objectiveDelta <= tol;
  }
};

Residuals verify(const Problem& problem, const Solution& solution);

/// Line-oriented dump: "max c1 ... cn", then "a1 ... an <=|=|>= b  # name" per row.
void write_text(const Problem& problem, std::ostream& out);

}  // namespace tlfw::lp
