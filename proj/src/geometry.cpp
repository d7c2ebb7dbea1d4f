#include "metasolve/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <limits>
#include <vector>

namespace metasolve {

namespace {

// Minimum-norm point in the affine hull of the columns of p indexed by
// `corral`: solve [P^T P, 1; 1^T, 0] [beta; mu] = [0; 1].
Vector affine_min_norm(const Matrix& p, const std::vector<int>& corral) {
  const Eigen::Index k = static_cast<Eigen::Index>(corral.size());
  Matrix sys(k + 1, k + 1);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      sys(a, b) = p.col(corral[static_cast<std::size_t>(a)])
                      .dot(p.col(corral[static_cast<std::size_t>(b)]));
  sys.row(k).setOnes();
  sys.col(k).setOnes();
  sys(k, k) = 0;
  Vector rhs = Vector::Zero(k + 1);
  rhs[k] = 1.0;
  Vector sol = sys.fullPivLu().solve(rhs);
  return sol.head(k);
}

}  // namespace

double hull_distance(const HullQuery& q) {
  if (q.rows.rows() == 0) throw std::invalid_argument("hull_distance: need at least one row");
  if (q.rows.cols() != q.candidate.size())
    throw std::invalid_argument("hull_distance: dimension mismatch");
  const Eigen::Index n = q.rows.rows();
  // Shifted points: distance to hull(rows) = min-norm point of {row_i - c}.
  Matrix p = (q.rows.rowwise() - q.candidate.transpose()).transpose();  // dim x n

  // Wolfe's algorithm.
  int start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = p.col(i).squaredNorm();
    if (s < best) {
      best = s;
      start = static_cast<int>(i);
    }
  }
  std::vector<int> corral{start};
  std::vector<double> lambda{1.0};
  Vector x = p.col(start);
  const double eps = 1e-12;
  for (int major = 0; major < 16 * static_cast<int>(n) + 64; ++major) {
    // Most violating point.
    int q_idx = -1;
    double q_val = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = x.dot(p.col(i));
      if (v < q_val - 1e-15) {
        q_val = v;
        q_idx = static_cast<int>(i);
      }
    }
    if (q_val >= x.squaredNorm() - eps * (1.0 + x.squaredNorm())) break;
    if (std::find(corral.begin(), corral.end(), q_idx) == corral.end()) {
      corral.push_back(q_idx);
      lambda.push_back(0.0);
    }
    // Minor cycle.
    for (int minor = 0; minor < static_cast<int>(n) + 8; ++minor) {
      const Vector beta = affine_min_norm(p, corral);
      bool interior = true;
      for (Eigen::Index a = 0; a < beta.size(); ++a)
        if (beta[a] <= eps) interior = false;
      if (interior) {
        lambda.assign(beta.data(), beta.data() + beta.size());
        x = Vector::Zero(p.rows());
        for (std::size_t a = 0; a < corral.size(); ++a) x += lambda[a] * p.col(corral[a]);
        break;
      }
      // Step toward beta until the first coordinate hits zero.
      double theta = 1.0;
      for (std::size_t a = 0; a < corral.size(); ++a) {
        const double b = beta[static_cast<Eigen::Index>(a)];
        if (b < lambda[a]) {
          const double t = lambda[a] / (lambda[a] - b);
          theta = std::min(theta, t);
        }
      }
      std::vector<int> next_corral;
      std::vector<double> next_lambda;
      for (std::size_t a = 0; a < corral.size(); ++a) {
        const double v = (1 - theta) * lambda[a] + theta * beta[static_cast<Eigen::Index>(a)];
        if (v > eps) {
          next_corral.push_back(corral[a]);
          next_lambda.push_back(v);
        }
      }
      if (next_corral.empty()) {
        // Numerical corner: keep the single largest coefficient point.
        std::size_t keep = 0;
        for (std::size_t a = 1; a < corral.size(); ++a)
          if (lambda[a] > lambda[keep]) keep = a;
        next_corral.push_back(corral[keep]);
        next_lambda.push_back(1.0);
      }
      corral.swap(next_corral);
      lambda.swap(next_lambda);
      const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
      for (double& l : lambda) l /= total;
      x = Vector::Zero(p.rows());
      for (std::size_t a = 0; a < corral.size(); ++a) x += lambda[a] * p.col(corral[a]);
    }
  }
  return x.norm();
}

bool hull_contains(const HullQuery& q, double tol) { return hull_distance(q) <= tol; }

bool verify_enlargement(const Matrix& before, const Vector& added, double tol) {
  if (before.rows() == 0) throw std::invalid_argument("verify_enlargement: need existing rows");
  return !hull_contains(HullQuery{before, added}, tol);
}

}  // namespace metasolve
