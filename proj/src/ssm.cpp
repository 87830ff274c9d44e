#include "lrss2d/ssm.hpp"

#include <cmath>
#include <string>

#include "lrss2d/errors.hpp"

namespace lrss2d {

ContinuousSsm::ContinuousSsm(Matrix a_in, Matrix b_in, Matrix c_in)
    : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)), state_dim(a.rows()) {
    if (a.rows() != a.cols())
        throw ShapeError("ContinuousSsm: A must be square, got " + a.shape_string());
    if (b.rows() != state_dim || b.cols() != 1)
        throw ShapeError("ContinuousSsm: B must be " + std::to_string(state_dim) + "x1, got " +
                         b.shape_string());
    if (c.rows() != 1 || c.cols() != state_dim)
        throw ShapeError("ContinuousSsm: C must be 1x" + std::to_string(state_dim) + ", got " +
                         c.shape_string());
}

ContinuousSsm ContinuousSsm::random_stable(std::size_t state_dim, Rng& rng) {
    const double n = static_cast<double>(state_dim);
    Matrix a(state_dim, state_dim);
    for (std::size_t i = 0; i < state_dim; ++i)
        for (std::size_t j = 0; j < state_dim; ++j)
            a(i, j) = (i == j ? -(static_cast<double>(i) + 1.0) / n : 0.0) + 0.05 * rng.normal();
    // keep the diagonal strictly negative
    for (std::size_t i = 0; i < state_dim; ++i) a(i, i) = -std::abs(a(i, i));
    Matrix b = Matrix::random_normal(state_dim, 1, rng, 1.6 / n);
    Matrix c = Matrix::random_normal(1, state_dim, rng, 1.6 / n);
    return ContinuousSsm(std::move(a), std::move(b), std::move(c));
}

double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

DiscreteSsm discretize_zoh(const ContinuousSsm& ssm, double delta) {
    if (!(delta > 0.0))
        throw ArgumentError("discretize_zoh: delta must be positive, got " +
                            std::to_string(delta));
    const std::size_t n = ssm.state_dim;
    Matrix augmented(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) augmented(i, j) = delta * ssm.a(i, j);
        augmented(i, n) = delta * ssm.b(i, 0);
    }
    const Matrix phi = mat_exp(augmented);

    DiscreteSsm d;
    d.a_bar = Matrix(n, n);
    d.b_bar = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d.a_bar(i, j) = phi(i, j);
        d.b_bar(i, 0) = phi(i, n);
    }
    d.c = ssm.c;
    return d;
}

double selective_delta(const SelectiveDelta& sd, std::span<const double> x) {
    if (sd.w.cols() != x.size())
        throw ShapeError("selective_delta: token size " + std::to_string(x.size()) +
                         " does not match w " + sd.w.shape_string());
    double z = sd.bias;
    for (std::size_t i = 0; i < x.size(); ++i) z += sd.w(0, i) * x[i];
    return softplus(z);
}

namespace {

// One recurrence step shared by every scan so degenerate variants agree
// bit-exactly: h_next = a_bar h + b_bar x, y = c h_next.
inline double scan_step(const double* a_bar, const double* b_bar, const double* c,
                        std::size_t n, double x, const double* h, double* h_next) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = a_bar + i * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * h[j];
        h_next[i] = acc + b_bar[i] * x;
    }
    double y = 0.0;
    for (std::size_t j = 0; j < n; ++j) y += c[j] * h_next[j];
    return y;
}

std::vector<double> initial_state(std::span<const double> h0, std::size_t n) {
    if (h0.empty()) return std::vector<double>(n, 0.0);
    if (h0.size() != n)
        throw ShapeError("scan: h0 has size " + std::to_string(h0.size()) + ", expected " +
                         std::to_string(n));
    return {h0.begin(), h0.end()};
}

}  // namespace

StateTrajectory scan_1d(const DiscreteSsm& d, std::span<const double> x,
                        std::span<const double> h0) {
    if (x.empty()) throw ArgumentError("scan_1d: input sequence must have length >= 1");
    const std::size_t n = d.a_bar.rows();
    const std::size_t len = x.size();

    StateTrajectory traj;
    traj.length = len;
    traj.state_dim = n;
    traj.states.resize(len * n);
    traj.outputs.resize(len);

    std::vector<double> h = initial_state(h0, n);
    for (std::size_t k = 0; k < len; ++k) {
        double* h_next = traj.states.data() + k * n;
        traj.outputs[k] = scan_step(d.a_bar.raw(), d.b_bar.raw(), d.c.raw(), n, x[k],
                                    h.data(), h_next);
        h.assign(h_next, h_next + n);
    }
    return traj;
}

StateTrajectory scan_1d_selective(const ContinuousSsm& ssm, const SelectiveDelta& sd,
                                  const std::vector<std::vector<double>>& tokens,
                                  const Matrix& proj_in, std::span<const double> h0) {
    if (tokens.empty())
        throw ArgumentError("scan_1d_selective: input sequence must have length >= 1");
    if (proj_in.rows() != 1 || proj_in.cols() != sd.w.cols())
        throw ShapeError("scan_1d_selective: proj_in must be 1x" + std::to_string(sd.w.cols()) +
                         ", got " + proj_in.shape_string());
    const std::size_t n = ssm.state_dim;

    StateTrajectory traj;
    traj.length = tokens.size();
    traj.state_dim = n;
    traj.states.resize(tokens.size() * n);
    traj.outputs.resize(tokens.size());

    std::vector<double> h = initial_state(h0, n);
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const std::vector<double>& token = tokens[k];
        const double delta = selective_delta(sd, token);
        const DiscreteSsm d = discretize_zoh(ssm, delta);
        double u = 0.0;
        for (std::size_t i = 0; i < token.size(); ++i) u += proj_in(0, i) * token[i];
        double* h_next = traj.states.data() + k * n;
        traj.outputs[k] = scan_step(d.a_bar.raw(), d.b_bar.raw(), d.c.raw(), n, u,
                                    h.data(), h_next);
        h.assign(h_next, h_next + n);
    }
    return traj;
}

}  // namespace lrss2d
