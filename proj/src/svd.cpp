#include "lrss2d/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lrss2d/errors.hpp"

namespace lrss2d {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagTol = 1e-12;

double column_dot(const Matrix& w, std::size_t p, std::size_t q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) sum += w(i, p) * w(i, q);
    return sum;
}

// One-sided Jacobi on a tall (m >= n) matrix: rotate column pairs of a
// working copy until all pairs are orthogonal, accumulating the rotations
// into V. At convergence the working copy equals U * diag(sigma).
SvdResult svd_tall(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix w = a;
    Matrix v = Matrix::identity(n);

    bool converged = (n <= 1);
    double worst_ratio = 0.0;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        bool rotated = false;
        worst_ratio = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = column_dot(w, p, p);
                const double beta = column_dot(w, q, q);
                const double gamma = column_dot(w, p, q);
                const double denom = std::sqrt(alpha * beta);
                if (denom > 0.0) worst_ratio = std::max(worst_ratio, std::abs(gamma) / denom);
                if (std::abs(gamma) <= kOffDiagTol * denom) continue;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
                rotated = true;
            }
        }
        if (!rotated) converged = true;
    }
    if (!converged)
        throw NumericalError("svd: no convergence after " + std::to_string(kMaxSweeps) +
                             " sweeps; max off-diagonal ratio " + std::to_string(worst_ratio));

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(column_dot(w, j, j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    const double sigma_max = n == 0 ? 0.0 : norms[order[0]];
    const double zero_cut = sigma_max * 1e-14;

    SvdResult out;
    out.sigma.resize(n);
    out.u = Matrix(m, m);
    Matrix v_sorted(n, n);
    std::vector<std::size_t> done;
    std::vector<std::size_t> empty_slots;
    done.reserve(m);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = norms[src];
        for (std::size_t i = 0; i < n; ++i) v_sorted(i, j) = v(i, src);
        if (norms[src] > zero_cut) {
            for (std::size_t i = 0; i < m; ++i) out.u(i, j) = w(i, src) / norms[src];
            done.push_back(j);
        } else {
            empty_slots.push_back(j);
        }
    }
    for (std::size_t j = n; j < m; ++j) empty_slots.push_back(j);

    // Complete u to a full orthonormal basis: for each empty column pick the
    // canonical basis vector with the largest residual against the filled
    // columns and Gram-Schmidt it in (two passes, then renormalize).
    for (std::size_t slot : empty_slots) {
        std::size_t best = 0;
        double best_res = -1.0;
        for (std::size_t e = 0; e < m; ++e) {
            double proj_sq = 0.0;
            for (std::size_t col : done) proj_sq += out.u(e, col) * out.u(e, col);
            if (1.0 - proj_sq > best_res) {
                best_res = 1.0 - proj_sq;
                best = e;
            }
        }
        std::vector<double> cand(m, 0.0);
        cand[best] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t col : done) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += cand[i] * out.u(i, col);
                for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * out.u(i, col);
            }
            double nrm = 0.0;
            for (double x : cand) nrm += x * x;
            nrm = std::sqrt(nrm);
            for (double& x : cand) x /= nrm;
        }
        for (std::size_t i = 0; i < m; ++i) out.u(i, slot) = cand[i];
        done.push_back(slot);
    }

    out.vt = v_sorted.transpose();
    return out;
}

void apply_sign_convention(SvdResult& r) {
    const std::size_t m = r.u.rows();
    const std::size_t k = r.sigma.size();
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double mag = std::abs(r.u(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (r.u(arg, j) < 0.0) {
            for (std::size_t i = 0; i < m; ++i) r.u(i, j) = -r.u(i, j);
            if (j < k)
                for (std::size_t i = 0; i < r.vt.cols(); ++i) r.vt(j, i) = -r.vt(j, i);
        }
    }
}

}  // namespace

SvdResult svd(const Matrix& a) {
    if (!a.all_finite()) throw ArgumentError("svd: input has non-finite entries");
    if (a.rows() == 0 || a.cols() == 0) throw ArgumentError("svd: empty matrix");

    SvdResult result;
    if (a.rows() >= a.cols()) {
        result = svd_tall(a);
    } else {
        // A = (V' S U'^T)^T of the transposed problem.
        SvdResult t = svd_tall(a.transpose());
        result.u = t.vt.transpose();
        result.vt = t.u.transpose();
        result.sigma = std::move(t.sigma);
    }
    apply_sign_convention(result);
    return result;
}

std::pair<Matrix, Matrix> truncate_svd(const SvdResult& s, std::size_t r) {
    const std::size_t k = s.sigma.size();
    if (r < 1 || r > k)
        throw ArgumentError("truncate_svd: rank " + std::to_string(r) + " out of [1, " +
                            std::to_string(k) + "]");
    const std::size_t m = s.u.rows();
    const std::size_t n = s.vt.cols();
    Matrix ur(m, r);
    Matrix vr(n, r);
    for (std::size_t j = 0; j < r; ++j) {
        const double scale = std::sqrt(s.sigma[j]);
        for (std::size_t i = 0; i < m; ++i) ur(i, j) = s.u(i, j) * scale;
        for (std::size_t i = 0; i < n; ++i) vr(i, j) = s.vt(j, i) * scale;
    }
    return {std::move(ur), std::move(vr)};
}

}  // namespace lrss2d
