#pragma once

#include <cmath>
#include <cstdlib>

#include "lrss2d/matrix.hpp"

namespace lrss2d::testutil {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return HUGE_VAL;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

inline bool matrix_approx(const Matrix& a, const Matrix& b, double tol) {
    return max_abs_diff(a, b) <= tol;
}

// Relative Frobenius distance, ||a-b||_F / max(1, ||b||_F).
inline double rel_frobenius(const Matrix& a, const Matrix& b) {
    return frobenius_norm(a - b) / std::max(1.0, frobenius_norm(b));
}

}  // namespace lrss2d::testutil
