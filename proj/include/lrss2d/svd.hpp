#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lrss2d/matrix.hpp"

namespace lrss2d {

// Full singular value decomposition A = u * diag(sigma) * vt.
// u is m x m orthogonal, vt is n x n orthogonal (transposed factor),
// sigma holds min(m, n) non-negative values in descending order.
struct SvdResult {
    Matrix u;
    std::vector<double> sigma;
    Matrix vt;
};

// One-sided Jacobi SVD. Deterministic: the entry of largest magnitude in
// every column of u is made non-negative (ties broken by lowest row index),
// with the corresponding row of vt flipped to preserve the product.
// Throws NumericalError if the column-orthogonalization sweeps do not
// converge within the iteration cap.
SvdResult svd(const Matrix& a);

// Rank-r truncation scaled for factor targets: returns (U_r, V_r) with
// U_r = first r columns of u scaled by sqrt(sigma), V_r likewise from v,
// so that U_r * V_r^T is the best rank-r Frobenius approximation.
// Throws ArgumentError when r is out of [1, len(sigma)].
std::pair<Matrix, Matrix> truncate_svd(const SvdResult& s, std::size_t r);

}  // namespace lrss2d
