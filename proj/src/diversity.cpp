#include "metasolve/diversity.hpp"

#include <cmath>

namespace metasolve {

Matrix build_kernel(const Eigen::Ref<const Matrix>& rows) {
  if (rows.rows() == 0) return Matrix(0, 0);
  Matrix l = rows * rows.transpose();
  return ((l + l.transpose()) / 2.0).eval();
}

double expected_cardinality(const Eigen::Ref<const Matrix>& kernel) {
  if (kernel.rows() == 0) return 0.0;
  if (kernel.rows() != kernel.cols())
    throw std::invalid_argument("expected_cardinality: kernel must be square");
  if ((kernel - kernel.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + kernel.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("expected_cardinality: kernel must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(kernel, Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    double lam = es.eigenvalues()[i];
    if (lam < -kPsdTol)
      throw std::invalid_argument("expected_cardinality: kernel is not positive semi-definite");
    if (lam < 0) lam = 0;
    total += lam / (1.0 + lam);
  }
  return total;
}

double diversity_of_rows(const Eigen::Ref<const Matrix>& rows) {
  return expected_cardinality(build_kernel(rows));
}

double dpp_subset_probability(const Eigen::Ref<const Matrix>& kernel,
                              const std::vector<int>& subset) {
  const Eigen::Index n = kernel.rows();
  for (int i : subset)
    if (i < 0 || i >= n) throw std::out_of_range("dpp_subset_probability: index out of range");
  const double normalizer =
      (Matrix::Identity(n, n) + kernel).lu().determinant();
  if (subset.empty()) return 1.0 / normalizer;
  Matrix sub(subset.size(), subset.size());
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = 0; b < subset.size(); ++b) sub(a, b) = kernel(subset[a], subset[b]);
  double det = sub.lu().determinant();
  if (det < 0 && det > -kPsdTol) det = 0;
  return det / normalizer;
}

double effective_diversity(const Matrix& payoffs, const JointProfile& nash) {
  if (nash.p1.size() != payoffs.rows() || nash.p2.size() != payoffs.cols())
    throw std::invalid_argument("effective_diversity: profile does not match payoffs");
  return nash.p1.probs.dot(payoffs.cwiseMax(0.0) * nash.p2.probs);
}

Vector diversity_gradient(const Eigen::Ref<const Matrix>& rows, const Vector& w) {
  if (rows.rows() > 0 && rows.cols() != w.size())
    throw std::invalid_argument("diversity_gradient: column mismatch");
  const Eigen::Index k = rows.rows() + 1;
  Matrix a(k, w.size());
  if (rows.rows() > 0) a.topRows(rows.rows()) = rows;
  a.row(k - 1) = w.transpose();
  Matrix li = a * a.transpose() + Matrix::Identity(k, k);
  Eigen::LDLT<Matrix> solver(li);
  Vector e = Vector::Zero(k);
  e[k - 1] = 1.0;
  const Vector b1 = solver.solve(e);
  const Vector b2 = solver.solve(b1);
  return 2.0 * (a.transpose() * b2);
}

Matrix qd_kernel(const Eigen::Ref<const Matrix>& rows, const Vector& pbr_values) {
  if (pbr_values.size() != rows.rows())
    throw std::invalid_argument("qd_kernel: one quality per row required");
  const double fro = rows.norm();
  if (fro <= 0.0) throw std::invalid_argument("qd_kernel: zero Frobenius norm");
  const Vector q = pbr_values.array().exp();
  Matrix l = (rows * rows.transpose()) / (fro * fro);
  l = (q * q.transpose()).cwiseProduct(l);
  return ((l + l.transpose()) / 2.0).eval();
}

}  // namespace metasolve
