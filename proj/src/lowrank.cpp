#include "lrss2d/lowrank.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lrss2d/errors.hpp"
#include "lrss2d/svd.hpp"

namespace lrss2d {

LowRankTransition::LowRankTransition(Matrix u_in, Matrix v_in)
    : u(std::move(u_in)), v(std::move(v_in)), rank(u.cols()) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw ShapeError("LowRankTransition: factor shapes differ, " + u.shape_string() +
                         " vs " + v.shape_string());
    if (rank < 1 || rank > u.rows())
        throw ArgumentError("LowRankTransition: rank " + std::to_string(rank) +
                            " out of [1, " + std::to_string(u.rows()) + "]");
}

Matrix LowRankTransition::materialize() const { return mat_mul(u, v.transpose()); }

std::size_t RankConfig::rank() const {
    const long r = std::lround(ratio * static_cast<double>(state_dim));
    return static_cast<std::size_t>(std::max(1l, r));
}

LowRankTransition init_from_teacher(const Matrix& a_bar_teacher, std::size_t r) {
    if (a_bar_teacher.rows() != a_bar_teacher.cols())
        throw ShapeError("init_from_teacher: transition must be square, got " +
                         a_bar_teacher.shape_string());
    if (r < 1 || r > a_bar_teacher.rows())
        throw ArgumentError("init_from_teacher: rank " + std::to_string(r) + " out of [1, " +
                            std::to_string(a_bar_teacher.rows()) + "]");
    auto [u, v] = truncate_svd(svd(a_bar_teacher), r);
    return LowRankTransition(std::move(u), std::move(v));
}

StateTrajectory lowrank_scan(const LowRankTransition& t, const Matrix& b_bar, const Matrix& c,
                             std::span<const double> x, std::span<const double> h0,
                             ScanCost* cost) {
    const std::size_t n = t.state_dim();
    const std::size_t r = t.rank;
    if (b_bar.rows() != n || b_bar.cols() != 1)
        throw ShapeError("lowrank_scan: b_bar must be " + std::to_string(n) + "x1, got " +
                         b_bar.shape_string());
    if (c.rows() != 1 || c.cols() != n)
        throw ShapeError("lowrank_scan: c must be 1x" + std::to_string(n) + ", got " +
                         c.shape_string());
    if (x.empty()) throw ArgumentError("lowrank_scan: input sequence must have length >= 1");
    if (!h0.empty() && h0.size() != n)
        throw ShapeError("lowrank_scan: h0 has size " + std::to_string(h0.size()) +
                         ", expected " + std::to_string(n));

    StateTrajectory traj;
    traj.length = x.size();
    traj.state_dim = n;
    traj.states.resize(x.size() * n);
    traj.outputs.resize(x.size());

    std::vector<double> h(n, 0.0);
    if (!h0.empty()) h.assign(h0.begin(), h0.end());
    std::vector<double> z(r);

    const double* pu = t.u.raw();
    const double* pv = t.v.raw();
    const double* pb = b_bar.raw();
    const double* pc = c.raw();

    for (std::size_t k = 0; k < x.size(); ++k) {
        // z = V^T h
        for (std::size_t j = 0; j < r; ++j) z[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double hi = h[i];
            const double* vrow = pv + i * r;
            for (std::size_t j = 0; j < r; ++j) z[j] += vrow[j] * hi;
        }
        if (cost) cost->multiply_adds += n * r;
        // h = U z + b_bar x_k
        double* h_next = traj.states.data() + k * n;
        const double xk = x[k];
        for (std::size_t i = 0; i < n; ++i) {
            const double* urow = pu + i * r;
            double acc = 0.0;
            for (std::size_t j = 0; j < r; ++j) acc += urow[j] * z[j];
            h_next[i] = acc + pb[i] * xk;
        }
        if (cost) cost->multiply_adds += n * r + n;
        // y = c h
        double y = 0.0;
        for (std::size_t i = 0; i < n; ++i) y += pc[i] * h_next[i];
        traj.outputs[k] = y;
        h.assign(h_next, h_next + n);
        if (cost) cost->multiply_adds += n;
    }
    return traj;
}

std::pair<std::size_t, std::size_t> transition_param_count(std::size_t n, std::size_t r) {
    if (r < 1 || r > n)
        throw ArgumentError("transition_param_count: rank " + std::to_string(r) +
                            " out of [1, " + std::to_string(n) + "]");
    return {n * n, 2 * n * r};
}

}  // namespace lrss2d
