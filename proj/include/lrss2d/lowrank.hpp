#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <utility>

#include "lrss2d/matrix.hpp"
#include "lrss2d/ssm.hpp"

namespace lrss2d {

// Factor pair replacing an NxN transition by U V^T with U, V in R^{Nxr}.
// The product is never materialized during a scan; each step projects the
// state down through V^T and back up through U (2Nr multiply-adds instead
// of N^2). Note the break-even: this only saves work for r < N/2.
struct LowRankTransition {
    Matrix u;  // N x r
    Matrix v;  // N x r
    std::size_t rank = 0;

    LowRankTransition() = default;
    LowRankTransition(Matrix u_in, Matrix v_in);

    std::size_t state_dim() const { return u.rows(); }
    // U V^T, for oracles and diagnostics only.
    Matrix materialize() const;
};

// Rank derived from a ratio in (0, 1]: r = max(1, round(ratio * N)).
struct RankConfig {
    double ratio = 1.0;
    std::size_t state_dim = 0;

    std::size_t rank() const;
};

// Multiply-add tally filled by the instrumented scan.
struct ScanCost {
    std::uint64_t multiply_adds = 0;
};

// Optimal rank-r factors of a teacher transition: U = first r left singular
// vectors scaled by sqrt(sigma), V likewise from the right; U V^T is the
// best rank-r Frobenius approximation of a_bar_teacher.
// Throws ArgumentError when r is out of [1, N].
LowRankTransition init_from_teacher(const Matrix& a_bar_teacher, std::size_t r);

// Two-step recurrence: z = V^T h (r-vector), h <- U z + b_bar x_k, y = c h.
// When cost is non-null it accumulates the executed multiply-adds
// (2Nr for the transition + N input + N output per step).
StateTrajectory lowrank_scan(const LowRankTransition& t, const Matrix& b_bar, const Matrix& c,
                             std::span<const double> x, std::span<const double> h0 = {},
                             ScanCost* cost = nullptr);

// (full, low) = (n^2, 2 n r) transition parameter counts.
std::pair<std::size_t, std::size_t> transition_param_count(std::size_t n, std::size_t r);

}  // namespace lrss2d
