#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lrss2d/matrix.hpp"
#include "lrss2d/rng.hpp"

namespace lrss2d {

// Continuous-time scalar-in/scalar-out state space system
//   h'(t) = A h(t) + B x(t),  y(t) = C h(t)
// with A in R^{NxN}, B in R^{Nx1}, C in R^{1xN}.
struct ContinuousSsm {
    Matrix a;
    Matrix b;
    Matrix c;
    std::size_t state_dim = 0;

    ContinuousSsm() = default;
    ContinuousSsm(Matrix a_in, Matrix b_in, Matrix c_in);

    // Stable, well-conditioned seeded system: A = -diag(1..N)/N plus
    // scale-0.05 noise with the diagonal kept negative; B and C entries
    // are N(0, 1/N).
    static ContinuousSsm random_stable(std::size_t state_dim, Rng& rng);
};

// Zero-order-hold discretization of a ContinuousSsm at a fixed step.
struct DiscreteSsm {
    Matrix a_bar;  // NxN
    Matrix b_bar;  // Nx1
    Matrix c;      // 1xN
};

// Input-dependent step size: delta(x) = softplus(w . x + bias) > 0.
struct SelectiveDelta {
    Matrix w;  // 1 x D_in
    double bias = 0.0;
};

// Hidden-state trajectory of a scan: L states of dimension N (row-major)
// plus the L scalar outputs.
struct StateTrajectory {
    std::size_t length = 0;
    std::size_t state_dim = 0;
    std::vector<double> states;   // length x state_dim
    std::vector<double> outputs;  // length

    std::span<const double> state(std::size_t t) const {
        return {states.data() + t * state_dim, state_dim};
    }
};

// Numerically stable softplus, ln(1 + e^z).
double softplus(double z);

// ZOH discretization: a_bar = exp(delta A); b_bar comes from the augmented
// exponential exp(delta [[A, B], [0, 0]]) whose top-right block equals
// (integral_0^delta exp(sA) ds) B, well-defined even for singular A.
// Throws ArgumentError for delta <= 0.
DiscreteSsm discretize_zoh(const ContinuousSsm& ssm, double delta);

// delta(x) = softplus(w . x + bias); strictly positive.
double selective_delta(const SelectiveDelta& sd, std::span<const double> x);

// Linear recurrence h_k = a_bar h_{k-1} + b_bar x_k, y_k = c h_k, k = 1..L.
StateTrajectory scan_1d(const DiscreteSsm& d, std::span<const double> x,
                        std::span<const double> h0 = {});

// Selective scan: each token re-discretizes the system at its own
// delta_t = softplus(w . x_t + bias); the scalar channel input is
// proj_in . x_t. proj_in must be 1 x D_in.
StateTrajectory scan_1d_selective(const ContinuousSsm& ssm, const SelectiveDelta& sd,
                                  const std::vector<std::vector<double>>& tokens,
                                  const Matrix& proj_in, std::span<const double> h0 = {});

}  // namespace lrss2d
