#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lrss2d/lowrank.hpp"
#include "lrss2d/matrix.hpp"
#include "lrss2d/ss2d.hpp"
#include "lrss2d/ssm.hpp"

namespace lrss2d {

// Maps a teacher hidden state (dim N_t) into the student state space
// (dim N_s) for trajectory alignment.
struct Projection {
    Matrix p;  // N_s x N_t

    // Identity block padded with zeros.
    static Projection identity_block(std::size_t n_s, std::size_t n_t);
    // Identity block plus seeded Gaussian noise (sigma 0.01 by default).
    static Projection identity_perturbed(std::size_t n_s, std::size_t n_t, Rng& rng,
                                         double sigma = 0.01);
};

// Weighting of the four objective terms.
struct DistillWeights {
    double task = 1.0;
    double svd = 0.5;
    double state = 0.1;
    double feat = 1.5;
};

// Frozen factor targets computed once from the teacher transition.
struct DistillTargets {
    Matrix u_target;  // N x r
    Matrix v_target;  // N x r

    static DistillTargets from_teacher(const Matrix& a_bar_teacher, std::size_t r);
};

struct GradientBundle {
    Matrix d_u;  // N x r
    Matrix d_v;  // N x r
    Matrix d_p;  // N_s x N_t
};

// ||u_s - u_t||_F^2 + ||v_s - v_t||_F^2.
double loss_svd(const Matrix& u_s, const Matrix& v_s, const DistillTargets& targets);

// (1/L) sum_t MSE(h_t_student, P h_t_teacher).
double loss_state(const StateTrajectory& h_student, const StateTrajectory& h_teacher,
                  const Projection& p);

// Direction-averaged trajectory alignment over a full layer bundle.
double loss_state_ss2d(const Ss2dTrajectories& student, const Ss2dTrajectories& teacher,
                       const Projection& p);

// Sum of squared element differences (unnormalized squared 2-norm).
double loss_feat(const FeatureMap& y_teacher, const FeatureMap& y_student);
double loss_feat(std::span<const double> y_teacher, std::span<const double> y_student);

// task*w.task + svd*w.svd + state*w.state + feat*w.feat; components and
// weights must be non-negative.
double loss_total(double task, double svd, double state, double feat, const DistillWeights& w);

struct DistillGradients {
    GradientBundle bundle;
    double task = 0.0;
    double svd = 0.0;
    double state = 0.0;
    double feat = 0.0;
    double total = 0.0;
};

// Analytic gradients of the weighted objective with respect to the student
// factors (U, V) and the projection P, backpropagated through the linear
// recurrence h_t = U V^T h_{t-1} + b_bar x_t with the adjoint recursion
// g_{t-1} = V U^T g_t + dL/dh_{t-1}. The teacher trajectory is frozen; the
// task component is a pass-through constant.
DistillGradients grad_distill(const LowRankTransition& student, const Matrix& b_bar,
                              const Matrix& c, const StateTrajectory& teacher_traj,
                              const DistillTargets& targets, const Projection& p,
                              std::span<const double> inputs, const DistillWeights& w,
                              double task_loss = 0.0);

struct TrainConfig {
    std::size_t state_dim = 8;
    std::size_t rank = 4;
    std::size_t seq_len = 32;
    std::size_t steps = 500;
    double learning_rate = 1e-2;
    std::uint64_t seed = 0;
    DistillWeights weights{};
};

struct TrainRecord {
    std::size_t step;
    double loss_task;
    double loss_svd;
    double loss_state;
    double loss_feat;
    double loss_total;
};

// Plain gradient descent on (U, V, P) against a frozen seeded teacher.
// Gradient steps use a fresh input sequence per step; the logged losses are
// evaluated on a fixed sequence sampled once at the start, so the log is
// exactly constant when learning_rate is zero. Record 0 is the initial
// state; one record follows per step. Throws TrainingError naming the step
// index if the loss diverges to NaN/Inf.
std::vector<TrainRecord> distill_train(const TrainConfig& cfg);

// CSV with header step,loss_task,loss_svd,loss_state,loss_feat,loss_total.
void write_training_log(const std::vector<TrainRecord>& log, const std::string& path);

}  // namespace lrss2d
