#pragma once

#include <vector>

#include "metasolve/types.hpp"

namespace metasolve {

// Gram kernel of the payoff rows, L = M M^T, symmetrized against rounding.
// An empty input yields the valid 0x0 kernel.
Matrix build_kernel(const Eigen::Ref<const Matrix>& rows);

// Expected cardinality of the determinantal point process with kernel L:
// Tr(I - (L + I)^{-1}) = sum_k lambda_k / (lambda_k + 1). Computed by
// symmetric eigendecomposition; eigenvalues within -kPsdTol of zero are
// clamped, anything lower is rejected.
double expected_cardinality(const Eigen::Ref<const Matrix>& kernel);

// Convenience: expected_cardinality(build_kernel(rows)).
double diversity_of_rows(const Eigen::Ref<const Matrix>& rows);

// det(L_Y) / det(L + I); the empty subset has probability 1 / det(L + I).
double dpp_subset_probability(const Eigen::Ref<const Matrix>& kernel,
                              const std::vector<int>& subset);

// Rectified bilinear form pi1^T max(M, 0) pi2 evaluated at a Nash profile.
double effective_diversity(const Matrix& payoffs, const JointProfile& nash);

// Gradient of expected_cardinality(build_kernel([rows; w^T])) with respect
// to the appended row w: 2 A^T (L + I)^{-2} e_last with A = [rows; w^T].
Vector diversity_gradient(const Eigen::Ref<const Matrix>& rows, const Vector& w);

// Quality-diversity kernel: L_ij = q_i q_j <w_i, w_j> with q_i =
// exp(pbr_values_i) and w_i the rows normalized by the full Frobenius norm.
Matrix qd_kernel(const Eigen::Ref<const Matrix>& rows, const Vector& pbr_values);

}  // namespace metasolve
