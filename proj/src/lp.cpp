#include "tlfw/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "tlfw/error.hpp"

namespace tlfw::lp {

std::size_t Problem::add_var(double cost, std::string name) {
  objective.push_back(cost);
  varNames.resize(objective.size() - 1);
  varNames.push_back(std::move(name));
  for (Row& r : rows) r.coeffs.resize(objective.size(), 0.0);
  return objective.size() - 1;
}

Row& Problem::add_row(Relation rel, double rhs, std::string name) {
  rows.push_back(Row{std::vector<double>(objective.size(), 0.0), rel, rhs, std::move(name)});
  return rows.back();
}

void Problem::validate() const {
  for (double c : objective)
    if (!std::isfinite(c)) throw InputError("lp: non-finite objective coefficient");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].coeffs.size() != objective.size())
      throw InputError(fmt::format("lp: row {} has {} coefficients, expected {}", i,
                                   rows[i].coeffs.size(), objective.size()));
    if (!std::isfinite(rows[i].rhs)) throw InputError(fmt::format("lp: row {} rhs", i));
    for (double a : rows[i].coeffs)
      if (!std::isfinite(a)) throw InputError(fmt::format("lp: row {} coefficient", i));
  }
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kHarrisTol = 1e-10;

enum class ColKind { Original, Slack, Artificial };

struct Column {
  ColKind kind;
  std::size_t ref;  // original variable index or row index
};

/// Dense Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<std::vector<double>> dense_solve(std::vector<double> a, std::vector<double> b,
                                               std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-14) return std::nullopt;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    const double inv = 1.0 / a[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] * inv;
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * x[k];
    x[c] = s / a[c * n + c];
  }
  return x;
}

class Tableau {
 public:
  Tableau(const Problem& p, const Options& opt) : p_(p), opt_(opt) {
    m_ = p.rows.size();
    const std::size_t n = p.num_vars();
    for (std::size_t j = 0; j < n; ++j) cols_.push_back({ColKind::Original, j});
    sign_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const Row& row = p.rows[i];
      const bool flip = row.rhs < 0.0 || (row.rhs == 0.0 && row.rel == Relation::GreaterEqual);
      sign_[i] = flip ? -1.0 : 1.0;
      if (p.rows[i].rel != Relation::Equal) cols_.push_back({ColKind::Slack, i});
    }
    for (std::size_t i = 0; i < m_; ++i)
      if (needs_artificial(i)) cols_.push_back({ColKind::Artificial, i});
    ncols_ = cols_.size();
    width_ = ncols_ + 1;
    t_.assign(m_ * width_, 0.0);
    basis_.assign(m_, 0);
    rowAlive_.assign(m_, true);

    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n; ++j) at(i, j) = sign_[i] * p.rows[i].coeffs[j];
      at(i, ncols_) = sign_[i] * p.rows[i].rhs;
    }
    identity_.assign(m_, 0);
    for (std::size_t c = n; c < ncols_; ++c) {
      const std::size_t i = cols_[c].ref;
      if (cols_[c].kind == ColKind::Slack) {
        at(i, c) = sign_[i] * slack_sign(i);
        if (!needs_artificial(i)) basis_[i] = identity_[i] = c;
      } else {
        at(i, c) = 1.0;
        basis_[i] = identity_[i] = c;
      }
    }
    scale_ = 1.0;
    for (std::size_t i = 0; i < m_; ++i) scale_ = std::max(scale_, std::abs(at(i, ncols_)));
    set_limits();
  }

  /// Brings columns [oldVars, n) and rows [oldRows, m) of the problem into the
  /// current tableau. Returns false when the current basis cannot absorb them.
  bool append(std::size_t oldVars, std::size_t oldRows) {
    const std::size_t n = p_.num_vars();
    const std::size_t newM = p_.rows.size();
    for (std::size_t i = oldRows; i < newM; ++i)
      if (p_.rows[i].rel != Relation::LessEqual || p_.rows[i].rhs < 0.0) return false;

    const std::size_t oldCols = ncols_;
    for (std::size_t j = oldVars; j < n; ++j) cols_.push_back({ColKind::Original, j});
    const std::size_t firstSlack = cols_.size();
    for (std::size_t i = oldRows; i < newM; ++i) cols_.push_back({ColKind::Slack, i});
    const std::size_t newCols = cols_.size();
    const std::size_t newWidth = newCols + 1;

    std::vector<double> t(newM * newWidth, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      std::copy_n(&t_[i * width_], oldCols, &t[i * newWidth]);
      t[i * newWidth + newCols] = t_[i * width_ + oldCols];
    }
    // New columns of existing rows: B^-1 a, read off the initial identity columns.
    for (std::size_t c = oldCols; c < firstSlack; ++c) {
      const std::size_t j = cols_[c].ref;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = sign_[r] * p_.rows[r].coeffs[j];
        if (a == 0.0) continue;
        const std::size_t id = identity_[r];
        for (std::size_t i = 0; i < m_; ++i)
          if (rowAlive_[i]) t[i * newWidth + c] += a * t_[i * width_ + id];
      }
    }
    t_ = std::move(t);
    ncols_ = newCols;
    width_ = newWidth;

    for (std::size_t i = oldRows; i < newM; ++i) {
      double* row = &t_[i * width_];
      for (std::size_t c = 0; c < ncols_; ++c)
        if (cols_[c].kind == ColKind::Original) row[c] = p_.rows[i].coeffs[cols_[c].ref];
      const std::size_t slack = firstSlack + (i - oldRows);
      row[slack] = 1.0;
      row[ncols_] = p_.rows[i].rhs;
      for (std::size_t r = 0; r < i; ++r) {
        if (!rowAlive_[r]) continue;
        const double f = row[basis_[r]];
        if (f == 0.0) continue;
        const double* src = &t_[r * width_];
        for (std::size_t c = 0; c < width_; ++c) row[c] -= f * src[c];
        row[basis_[r]] = 0.0;
      }
      sign_.push_back(1.0);
      basis_.push_back(slack);
      identity_.push_back(slack);
      rowAlive_.push_back(true);
      m_ = i + 1;
      if (row[ncols_] < -opt_.feasTol * std::max(1.0, scale_)) return false;
    }
    for (std::size_t i = oldRows; i < m_; ++i) scale_ = std::max(scale_, std::abs(at(i, ncols_)));
    set_limits();
    return true;
  }

  /// Phase 2 from the current basis.
  Solution reoptimize() {
    solveStart_ = iterations_;
    std::vector<double> cost(ncols_, 0.0);
    for (std::size_t c = 0; c < ncols_; ++c)
      if (cols_[c].kind == ColKind::Original) cost[c] = p_.objective[cols_[c].ref];
    return finish(optimize(cost, /*allowArtificial=*/false));
  }

  Solution run() {
    solveStart_ = iterations_;
    // Phase 1: maximize -(sum of artificials).
    std::vector<double> cost(ncols_, 0.0);
    bool anyArtificial = false;
    for (std::size_t c = 0; c < ncols_; ++c)
      if (cols_[c].kind == ColKind::Artificial) {
        cost[c] = -1.0;
        anyArtificial = true;
      }
    if (anyArtificial) {
      const Status s = optimize(cost, /*allowArtificial=*/true);
      if (s == Status::IterationLimit) return finish(Status::IterationLimit);
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (rowAlive_[i] && cols_[basis_[i]].kind == ColKind::Artificial)
          infeas += at(i, ncols_);
      if (infeas > opt_.feasTol * scale_) return finish(Status::Infeasible);
      drive_out_artificials();
    }

    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t c = 0; c < ncols_; ++c)
      if (cols_[c].kind == ColKind::Original) cost[c] = p_.objective[cols_[c].ref];
    const Status s = optimize(cost, /*allowArtificial=*/false);
    return finish(s);
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }

  void set_limits() {
    const std::size_t size = m_ + p_.num_vars();
    maxIter_ = opt_.maxIter ? opt_.maxIter : 50 * std::max<std::size_t>(size, 1);
    blandAfter_ = 3 * size;
  }

  double slack_sign(std::size_t i) const {
    return p_.rows[i].rel == Relation::LessEqual ? 1.0 : -1.0;
  }
  bool needs_artificial(std::size_t i) const {
    const Relation rel = p_.rows[i].rel;
    if (rel == Relation::Equal) return true;
    // After orienting rhs >= 0 the slack must enter with +1 to start basic.
    return sign_[i] * slack_sign(i) < 0.0;
  }

  void pivot(std::size_t r, std::size_t e) {
    double* prow = &t_[r * width_];
    const double inv = 1.0 / prow[e];
    nz_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (prow[k] == 0.0) continue;
      prow[k] *= inv;
      nz_.push_back(k);
    }
    prow[e] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || !rowAlive_[i]) continue;
      double* row = &t_[i * width_];
      const double f = row[e];
      if (f == 0.0) continue;
      for (std::size_t k : nz_) row[k] -= f * prow[k];
      row[e] = 0.0;
    }
    basis_[r] = e;
  }

  Status optimize(const std::vector<double>& cost, bool allowArtificial) {
    std::vector<double> rc(ncols_);
    std::vector<bool> isBasic(ncols_, false);
    for (;;) {
      // Reduced costs from scratch keep the objective row free of drift.
      std::fill(isBasic.begin(), isBasic.end(), false);
      for (std::size_t i = 0; i < m_; ++i)
        if (rowAlive_[i]) isBasic[basis_[i]] = true;
      rc = cost;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!rowAlive_[i]) continue;
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = &t_[i * width_];
        for (std::size_t c = 0; c < ncols_; ++c) rc[c] -= cb * row[c];
      }
      for (std::size_t c = 0; c < ncols_; ++c)
        if (isBasic[c] || (!allowArtificial && cols_[c].kind == ColKind::Artificial)) rc[c] = 0.0;

      const bool bland = iterations_ - solveStart_ >= blandAfter_;
      std::size_t enter = ncols_;
      double bestRc = opt_.costTol;
      for (std::size_t c = 0; c < ncols_; ++c) {
        if (rc[c] <= opt_.costTol) continue;
        if (bland) {
          enter = c;
          break;
        }
        if (rc[c] > bestRc) {
          bestRc = rc[c];
          enter = c;
        }
      }
      if (enter == ncols_) return Status::Optimal;
      if (iterations_ - solveStart_ >= maxIter_) return Status::IterationLimit;

      // Two-pass ratio test: bound the step with a small feasibility relaxation,
      // then take the largest pivot among rows within that bound.
      double maxStep = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (!rowAlive_[i]) continue;
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        maxStep = std::min(maxStep, (std::max(0.0, at(i, ncols_)) + kHarrisTol) / a);
      }
      std::size_t leave = m_;
      double bestPivot = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!rowAlive_[i]) continue;
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        if (std::max(0.0, at(i, ncols_)) / a > maxStep) continue;
        if (leave == m_ || a > bestPivot * (1 + 1e-12) ||
            (a >= bestPivot * (1 - 1e-12) && basis_[i] < basis_[leave])) {
          leave = i;
          bestPivot = a;
        }
      }
      if (leave == m_) return Status::Unbounded;
      pivot(leave, enter);
      ++iterations_;
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!rowAlive_[i] || cols_[basis_[i]].kind != ColKind::Artificial) continue;
      std::size_t enter = ncols_;
      for (std::size_t c = 0; c < ncols_; ++c) {
        if (cols_[c].kind == ColKind::Artificial) continue;
        if (std::abs(at(i, c)) > 1e-9) {
          enter = c;
          break;
        }
      }
      if (enter == ncols_) {
        rowAlive_[i] = false;  // linearly dependent row
      } else {
        pivot(i, enter);
      }
    }
  }

  Solution finish(Status status) {
    Solution sol;
    sol.status = status;
    sol.iterations = iterations_ - solveStart_;
    const std::size_t n = p_.num_vars();
    sol.values.assign(n, 0.0);
    sol.duals.assign(m_, 0.0);
    if (status != Status::Optimal) return sol;

    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < m_; ++i)
      if (rowAlive_[i]) live.push_back(i);
    const std::size_t k = live.size();

    for (std::size_t i : live)
      if (cols_[basis_[i]].kind == ColKind::Original)
        sol.values[cols_[basis_[i]].ref] = at(i, ncols_);

    // Re-solve the optimal basis against the original data: cleaner values and
    // the row duals in the caller's orientation.
    std::vector<double> B(k * k, 0.0), rhs(k), cB(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) rhs[r] = p_.rows[live[r]].rhs;
    for (std::size_t c = 0; c < k; ++c) {
      const Column& col = cols_[basis_[live[c]]];
      if (col.kind == ColKind::Original) {
        for (std::size_t r = 0; r < k; ++r) B[r * k + c] = p_.rows[live[r]].coeffs[col.ref];
        cB[c] = p_.objective[col.ref];
      } else {
        for (std::size_t r = 0; r < k; ++r)
          if (live[r] == col.ref) B[r * k + c] = slack_sign(col.ref);
      }
    }
    if (auto xb = dense_solve(B, rhs, k)) {
      std::vector<double> refined(n, 0.0);
      bool sane = true;
      for (std::size_t c = 0; c < k; ++c) {
        const Column& col = cols_[basis_[live[c]]];
        if (col.kind != ColKind::Original) continue;
        double v = (*xb)[c];
        if (v < 0.0 && v > -opt_.feasTol * scale_) v = 0.0;
        if (!std::isfinite(v) || v < 0.0) sane = false;
        refined[col.ref] = v;
      }
      if (sane) sol.values = std::move(refined);
      std::vector<double> BT(k * k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) BT[c * k + r] = B[r * k + c];
      if (auto y = dense_solve(BT, cB, k))
        for (std::size_t r = 0; r < k; ++r) sol.duals[live[r]] = (*y)[r];
    }
    for (double& v : sol.values)
      if (v < 0.0) v = 0.0;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += p_.objective[j] * sol.values[j];
    sol.objectiveValue = obj;
    return sol;
  }

  const Problem& p_;
  const Options& opt_;
  std::size_t m_ = 0;
  std::size_t ncols_ = 0;
  std::size_t width_ = 0;
  std::vector<Column> cols_;
  std::vector<double> sign_;
  std::vector<double> t_;
  std::vector<std::size_t> nz_;
  std::vector<std::size_t> basis_;
  std::vector<bool> rowAlive_;
  double scale_ = 1.0;
  std::size_t iterations_ = 0;
  std::size_t solveStart_ = 0;
  std::vector<std::size_t> identity_;
  std::size_t maxIter_ = 0;
  std::size_t blandAfter_ = 0;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  problem.validate();
  Tableau t(problem, options);
  return t.run();
}

struct IncrementalSolver::Impl {
  Problem problem;
  Options options;
  std::unique_ptr<Tableau> tableau;
  std::size_t syncedVars = 0;
  std::size_t syncedRows = 0;
  bool warm = false;
};

IncrementalSolver::IncrementalSolver(Problem problem, Options options)
    : impl_(std::make_unique<Impl>()) {
  impl_->problem = std::move(problem);
  impl_->options = options;
}

IncrementalSolver::~IncrementalSolver() = default;

const Problem& IncrementalSolver::problem() const { return impl_->problem; }

std::size_t IncrementalSolver::add_column(double cost, std::span<const Entry> entries,
                                          std::string name) {
  Problem& p = impl_->problem;
  const std::size_t j = p.add_var(cost, std::move(name));
  for (const Entry& e : entries) {
    if (e.row >= p.rows.size()) throw InputError(fmt::format("lp: column entry on row {}", e.row));
    p.rows[e.row].coeffs[j] += e.value;
  }
  return j;
}

std::size_t IncrementalSolver::add_row(Relation rel, double rhs, std::span<const Entry> entries,
                                       std::string name) {
  Problem& p = impl_->problem;
  Row& r = p.add_row(rel, rhs, std::move(name));
  for (const Entry& e : entries) {
    if (e.row >= r.coeffs.size()) throw InputError(fmt::format("lp: row entry on column {}", e.row));
    r.coeffs[e.row] += e.value;
  }
  return p.rows.size() - 1;
}

Solution IncrementalSolver::solve() {
  Impl& s = *impl_;
  s.problem.validate();
  Solution sol;
  bool done = false;
  if (s.tableau && s.warm && s.tableau->append(s.syncedVars, s.syncedRows)) {
    sol = s.tableau->reoptimize();
    done = true;
  }
  if (!done) {
    s.tableau = std::make_unique<Tableau>(s.problem, s.options);
    sol = s.tableau->run();
  }
  s.warm = sol.status == Status::Optimal;
  s.syncedVars = s.problem.num_vars();
  s.syncedRows = s.problem.rows.size();
  return sol;
}

Residuals verify(const Problem& problem, const Solution& solution) {
  Residuals res;
  const auto& x = solution.values;
  if (x.size() != problem.num_vars()) {
    res.maxViolation = std::numeric_limits<double>::infinity();
    return res;
  }
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const Row& r = problem.rows[i];
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += r.coeffs[j] * x[j];
    double v = 0.0;
    switch (r.rel) {
      case Relation::LessEqual: v = lhs - r.rhs; break;
      case Relation::GreaterEqual: v = r.rhs - lhs; break;
      case Relation::Equal: v = std::abs(lhs - r.rhs); break;
    }
    if (v > res.maxViolation) {
      res.maxViolation = v;
      res.worstRow = static_cast<std::ptrdiff_t>(i);
    }
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    obj += problem.objective[j] * x[j];
    if (-x[j] > res.maxNegativity) {
      res.maxNegativity = -x[j];
      res.worstVar = static_cast<std::ptrdiff_t>(j);
    }
  }
  res.objectiveDelta = std::abs(obj - solution.objectiveValue);
  return res;
}

void write_text(const Problem& problem, std::ostream& out) {
  out << "max";
  for (double c : problem.objective) out << ' ' << fmt::format("{:.17g}", c);
  out << '\n';
  for (const Row& r : problem.rows) {
    for (std::size_t j = 0; j < r.coeffs.size(); ++j)
      out << (j ? " " : "") << fmt::format("{:.17g}", r.coeffs[j]);
    const char* rel = r.rel == Relation::LessEqual ? "<=" : r.rel == Relation::Equal ? "=" : ">=";
    out << ' ' << rel << ' ' << fmt::format("{:.17g}", r.rhs);
    if (!r.name.empty()) out << "  # " << r.name;
    out << '\n';
  }
}

}  // namespace tlfw::lp
