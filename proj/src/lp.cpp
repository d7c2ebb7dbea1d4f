#include "metasolve/lp.hpp"

#include <vector>

namespace metasolve::lp {

namespace {

constexpr double kPivotTol = 1e-9;

// One simplex phase on tableau [A | b] with objective row `cost` (reduced
// costs maintained in-place). Basis holds the basic column of each row.
// Returns false if unbounded.
bool run_simplex(Matrix& t, std::vector<int>& basis, Vector& cost, double& cost_rhs) {
  const Eigen::Index m = t.rows();
  const Eigen::Index n = t.cols() - 1;
  for (;;) {
    // Bland: entering variable = lowest index with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (cost[j] < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;
    // Ratio test; ties broken by lowest basis variable index (Bland).
    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > kPivotTol) {
        const double ratio = t(i, n) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) return false;  // unbounded
    // Pivot.
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave && std::abs(t(i, enter)) > 0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    cost_rhs -= cost[enter] * t(leave, n);
    cost -= cost[enter] * t.row(leave).head(n).transpose();
    basis[leave] = static_cast<int>(enter);
  }
}

}  // namespace

Result solve_standard(Matrix a, Vector b, Vector c) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b[i] < 0) {
      a.row(i) = -a.row(i);
      b[i] = -b[i];
    }
  }
  // Phase 1: artificial basis.
  Matrix t(m, n + m + 1);
  t.leftCols(n) = a;
  t.middleCols(n, m) = Matrix::Identity(m, m);
  t.col(n + m) = b;
  std::vector<int> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = static_cast<int>(n + i);
  Vector cost1 = Vector::Zero(n + m);
  cost1.tail(m).setOnes();
  double rhs1 = 0.0;
  // Price out the artificial basis.
  for (Eigen::Index i = 0; i < m; ++i) {
    rhs1 -= t(i, n + m);
    cost1.head(n + m) -= t.row(i).head(n + m).transpose();
  }
  if (!run_simplex(t, basis, cost1, rhs1)) return {};
  if (-rhs1 > 1e-7) return {};  // infeasible (phase-1 optimum is -rhs1)

  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] >= n) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) continue;  // redundant row
      t.row(i) /= t(i, enter);
      for (Eigen::Index r = 0; r < m; ++r)
        if (r != i && std::abs(t(r, enter)) > 0) t.row(r) -= t(r, enter) * t.row(i);
      basis[i] = static_cast<int>(enter);
    }
  }

  // Phase 2 on the original columns.
  Matrix t2(m, n + 1);
  t2.leftCols(n) = t.leftCols(n);
  t2.col(n) = t.col(n + m);
  Vector cost2 = c;
  double rhs2 = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < n && std::abs(cost2[basis[i]]) > 0) {
      rhs2 -= cost2[basis[i]] * t2(i, n);
      cost2 -= cost2[basis[i]] * t2.row(i).head(n).transpose();
    }
  }
  // Rows still basic in an artificial variable are redundant; freeze them by
  // treating the artificial as a zero-cost variable outside the tableau.
  if (!run_simplex(t2, basis, cost2, rhs2)) {
    Result r;
    r.feasible = true;
    r.bounded = false;
    return r;
  }
  Result r;
  r.feasible = true;
  r.x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[i] < n) r.x[basis[i]] = t2(i, n);
  r.objective = c.dot(r.x);
  return r;
}

Vector maximin_strategy(const Matrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (rows == 0 || cols == 0) throw std::invalid_argument("maximin_strategy: empty matrix");
  if (rows == 1) return Vector::Ones(1);
  // Shift payoffs positive; with u = x / v the problem becomes
  // min 1^T u  s.t.  M'^T u - s = 1, u >= 0, s >= 0.
  const double shift = 1.0 - m.minCoeff();
  Matrix mp = m.array() + shift;
  Matrix a(cols, rows + cols);
  a.leftCols(rows) = mp.transpose();
  a.rightCols(cols) = -Matrix::Identity(cols, cols);
  Vector b = Vector::Ones(cols);
  Vector c = Vector::Zero(rows + cols);
  c.head(rows).setOnes();
  Result res = solve_standard(a, b, c);
  if (!res.feasible || !res.bounded || res.objective <= 0)
    throw std::runtime_error("maximin LP failed");
  Vector x = res.x.head(rows) / res.objective;
  // Clean tiny negatives and renormalize exactly.
  x = x.cwiseMax(0.0);
  x /= x.sum();
  return x;
}

}  // namespace metasolve::lp
