#include "lrss2d/distill.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "lrss2d/errors.hpp"
#include "lrss2d/svd.hpp"

namespace lrss2d {

Projection Projection::identity_block(std::size_t n_s, std::size_t n_t) {
    Projection proj;
    proj.p = Matrix(n_s, n_t);
    for (std::size_t i = 0; i < std::min(n_s, n_t); ++i) proj.p(i, i) = 1.0;
    return proj;
}

Projection Projection::identity_perturbed(std::size_t n_s, std::size_t n_t, Rng& rng,
                                          double sigma) {
    Projection proj = identity_block(n_s, n_t);
    for (double& x : proj.p.data()) x += sigma * rng.normal();
    return proj;
}

DistillTargets DistillTargets::from_teacher(const Matrix& a_bar_teacher, std::size_t r) {
    LowRankTransition t = init_from_teacher(a_bar_teacher, r);
    return DistillTargets{std::move(t.u), std::move(t.v)};
}

double loss_svd(const Matrix& u_s, const Matrix& v_s, const DistillTargets& targets) {
    if (u_s.rows() != targets.u_target.rows() || u_s.cols() != targets.u_target.cols())
        throw ShapeError("loss_svd: U " + u_s.shape_string() + " vs target " +
                         targets.u_target.shape_string());
    if (v_s.rows() != targets.v_target.rows() || v_s.cols() != targets.v_target.cols())
        throw ShapeError("loss_svd: V " + v_s.shape_string() + " vs target " +
                         targets.v_target.shape_string());
    const double du = frobenius_norm(u_s - targets.u_target);
    const double dv = frobenius_norm(v_s - targets.v_target);
    return du * du + dv * dv;
}

double loss_state(const StateTrajectory& h_student, const StateTrajectory& h_teacher,
                  const Projection& p) {
    if (h_student.length != h_teacher.length)
        throw ArgumentError("loss_state: trajectory lengths differ, " +
                            std::to_string(h_student.length) + " vs " +
                            std::to_string(h_teacher.length));
    if (p.p.rows() != h_student.state_dim || p.p.cols() != h_teacher.state_dim)
        throw ShapeError("loss_state: projection " + p.p.shape_string() + " does not map " +
                         std::to_string(h_teacher.state_dim) + " -> " +
                         std::to_string(h_student.state_dim));
    const std::size_t len = h_student.length;
    const std::size_t n_s = h_student.state_dim;
    const std::size_t n_t = h_teacher.state_dim;

    double total = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        const auto hs = h_student.state(t);
        const auto ht = h_teacher.state(t);
        double step_sum = 0.0;
        for (std::size_t i = 0; i < n_s; ++i) {
            double projected = 0.0;
            for (std::size_t j = 0; j < n_t; ++j) projected += p.p(i, j) * ht[j];
            const double d = hs[i] - projected;
            step_sum += d * d;
        }
        total += step_sum / static_cast<double>(n_s);
    }
    return total / static_cast<double>(len);
}

double loss_state_ss2d(const Ss2dTrajectories& student, const Ss2dTrajectories& teacher,
                       const Projection& p) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t dir = 0; dir < 4; ++dir) {
        const auto& st = student.per_direction[dir];
        const auto& te = teacher.per_direction[dir];
        if (st.size() != te.size())
            throw ArgumentError("loss_state_ss2d: channel counts differ in direction " +
                                std::to_string(dir));
        for (std::size_t ch = 0; ch < st.size(); ++ch) {
            total += loss_state(st[ch], te[ch], p);
            ++count;
        }
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double loss_feat(std::span<const double> y_teacher, std::span<const double> y_student) {
    if (y_teacher.size() != y_student.size())
        throw ShapeError("loss_feat: sizes differ, " + std::to_string(y_teacher.size()) +
                         " vs " + std::to_string(y_student.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < y_teacher.size(); ++i) {
        const double d = y_teacher[i] - y_student[i];
        sum += d * d;
    }
    return sum;
}

double loss_feat(const FeatureMap& y_teacher, const FeatureMap& y_student) {
    if (y_teacher.height() != y_student.height() || y_teacher.width() != y_student.width() ||
        y_teacher.channels() != y_student.channels())
        throw ShapeError("loss_feat: map shapes differ");
    return loss_feat(std::span<const double>(y_teacher.data()),
                     std::span<const double>(y_student.data()));
}

double loss_total(double task, double svd_term, double state, double feat,
                  const DistillWeights& w) {
    for (double component : {task, svd_term, state, feat})
        if (component < 0.0)
            throw ArgumentError("loss_total: components must be non-negative, got " +
                                std::to_string(component));
    for (double weight : {w.task, w.svd, w.state, w.feat})
        if (weight < 0.0)
            throw ArgumentError("loss_total: weights must be non-negative, got " +
                                std::to_string(weight));
    return w.task * task + w.svd * svd_term + w.state * state + w.feat * feat;
}

DistillGradients grad_distill(const LowRankTransition& student, const Matrix& b_bar,
                              const Matrix& c, const StateTrajectory& teacher_traj,
                              const DistillTargets& targets, const Projection& p,
                              std::span<const double> inputs, const DistillWeights& w,
                              double task_loss) {
    const std::size_t n = student.state_dim();
    const std::size_t r = student.rank;
    const std::size_t n_t = teacher_traj.state_dim;
    const std::size_t len = inputs.size();
    if (len != teacher_traj.length)
        throw ArgumentError("grad_distill: input length " + std::to_string(len) +
                            " does not match teacher trajectory " +
                            std::to_string(teacher_traj.length));

    // Forward pass, keeping the previous states and the low-dim projections.
    const StateTrajectory student_traj = lowrank_scan(student, b_bar, c, inputs);
    Matrix z_all(len, r);  // z_t = V^T h_{t-1}
    {
        std::vector<double> h_prev(n, 0.0);
        for (std::size_t t = 0; t < len; ++t) {
            for (std::size_t j = 0; j < r; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += student.v(i, j) * h_prev[i];
                z_all(t, j) = acc;
            }
            const auto ht = student_traj.state(t);
            h_prev.assign(ht.begin(), ht.end());
        }
    }

    // Projected teacher states and the loss terms.
    Matrix projected(len, n);  // P h_t_teacher
    double state_sum = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        const auto ht = teacher_traj.state(t);
        double step_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_t; ++j) acc += p.p(i, j) * ht[j];
            projected(t, i) = acc;
            const double d = student_traj.state(t)[i] - acc;
            step_sum += d * d;
        }
        state_sum += step_sum / static_cast<double>(n);
    }
    const double state_loss = state_sum / static_cast<double>(len);
    const double feat_loss = loss_feat(teacher_traj.outputs, student_traj.outputs);
    const double svd_loss = loss_svd(student.u, student.v, targets);

    DistillGradients out;
    out.task = task_loss;
    out.svd = svd_loss;
    out.state = state_loss;
    out.feat = feat_loss;
    out.total = loss_total(task_loss, svd_loss, state_loss, feat_loss, w);

    // Adjoint sweep. Direct term at h_t:
    //   w.state * 2/(L*N) (h_t - P hhat_t)  +  w.feat * 2 (y_t - yhat_t) c^T
    const double state_coeff = w.state * 2.0 / (static_cast<double>(len) * static_cast<double>(n));
    Matrix d_u(n, r);
    Matrix d_v(n, r);
    Matrix d_p(n, n_t);

    std::vector<double> g(n, 0.0);       // dO/dh_t
    std::vector<double> g_next(n, 0.0);  // dO/dh_{t+1} from the previous iteration
    std::vector<double> ug(r, 0.0);      // U^T g_{t+1}
    for (std::size_t t = len; t-- > 0;) {
        const auto hs = student_traj.state(t);
        const double y_err = 2.0 * w.feat * (student_traj.outputs[t] - teacher_traj.outputs[t]);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = state_coeff * (hs[i] - projected(t, i)) + y_err * c(0, i);
        if (t + 1 < len) {
            // + V U^T g_{t+1}
            for (std::size_t j = 0; j < r; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += student.u(i, j) * g_next[i];
                ug[j] = acc;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < r; ++j) acc += student.v(i, j) * ug[j];
                g[i] += acc;
            }
        }

        // dU += g_t z_t^T ; dV += h_{t-1} (U^T g_t)^T
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < r; ++j) d_u(i, j) += g[i] * z_all(t, j);
        for (std::size_t j = 0; j < r; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += student.u(i, j) * g[i];
            ug[j] = acc;
        }
        if (t > 0) {
            const auto h_prev = student_traj.state(t - 1);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < r; ++j) d_v(i, j) += h_prev[i] * ug[j];
        }
        // h_{-1} = 0 contributes nothing to dV.

        // dP += state_coeff (P hhat_t - h_t) hhat_t^T
        const auto ht = teacher_traj.state(t);
        for (std::size_t i = 0; i < n; ++i) {
            const double res = state_coeff * (projected(t, i) - hs[i]);
            if (res == 0.0) continue;
            for (std::size_t j = 0; j < n_t; ++j) d_p(i, j) += res * ht[j];
        }

        g_next = g;
    }

    // SVD-alignment term.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            d_u(i, j) += 2.0 * w.svd * (student.u(i, j) - targets.u_target(i, j));
            d_v(i, j) += 2.0 * w.svd * (student.v(i, j) - targets.v_target(i, j));
        }

    out.bundle = GradientBundle{std::move(d_u), std::move(d_v), std::move(d_p)};
    return out;
}

std::vector<TrainRecord> distill_train(const TrainConfig& cfg) {
    if (cfg.learning_rate < 0.0)
        throw ArgumentError("distill_train: learning rate must be non-negative");
    if (cfg.steps < 1) throw ArgumentError("distill_train: steps must be >= 1");
    if (cfg.rank < 1 || cfg.rank > cfg.state_dim)
        throw ArgumentError("distill_train: rank " + std::to_string(cfg.rank) + " out of [1, " +
                            std::to_string(cfg.state_dim) + "]");
    if (cfg.seq_len < 1) throw ArgumentError("distill_train: seq_len must be >= 1");

    Rng rng(cfg.seed);
    const ContinuousSsm teacher = ContinuousSsm::random_stable(cfg.state_dim, rng);
    const SelectiveDelta delta{Matrix::zeros(1, 1), 0.0};
    const DiscreteSsm teacher_d = discretize_zoh(teacher, softplus(delta.bias));

    const DistillTargets targets = DistillTargets::from_teacher(teacher_d.a_bar, cfg.rank);
    LowRankTransition student(targets.u_target, targets.v_target);
    Projection proj = Projection::identity_block(cfg.state_dim, cfg.state_dim);

    auto sample_sequence = [&](Rng& source) {
        std::vector<double> x(cfg.seq_len);
        for (double& v : x) v = source.normal();
        return x;
    };

    const std::vector<double> eval_x = sample_sequence(rng);
    const StateTrajectory teacher_eval = scan_1d(teacher_d, eval_x);

    auto eval_losses = [&](std::size_t step) {
        const StateTrajectory student_eval =
            lowrank_scan(student, teacher_d.b_bar, teacher_d.c, eval_x);
        TrainRecord rec;
        rec.step = step;
        rec.loss_task = 0.0;  // no detection head in the sequence-level loop
        rec.loss_svd = loss_svd(student.u, student.v, targets);
        rec.loss_state = loss_state(student_eval, teacher_eval, proj);
        rec.loss_feat = loss_feat(teacher_eval.outputs, student_eval.outputs);
        rec.loss_total = loss_total(rec.loss_task, rec.loss_svd, rec.loss_state, rec.loss_feat,
                                    cfg.weights);
        return rec;
    };

    std::vector<TrainRecord> log;
    log.reserve(cfg.steps + 1);
    log.push_back(eval_losses(0));

    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        const std::vector<double> train_x = sample_sequence(rng);
        const StateTrajectory teacher_traj = scan_1d(teacher_d, train_x);
        const DistillGradients grads =
            grad_distill(student, teacher_d.b_bar, teacher_d.c, teacher_traj, targets, proj,
                         train_x, cfg.weights);
        if (!std::isfinite(grads.total))
            throw TrainingError("distill_train: loss diverged at step " + std::to_string(step));

        const double lr = cfg.learning_rate;
        for (std::size_t i = 0; i < student.u.size(); ++i) {
            student.u.data()[i] -= lr * grads.bundle.d_u.data()[i];
            student.v.data()[i] -= lr * grads.bundle.d_v.data()[i];
        }
        for (std::size_t i = 0; i < proj.p.size(); ++i)
            proj.p.data()[i] -= lr * grads.bundle.d_p.data()[i];
        if (!student.u.all_finite() || !student.v.all_finite() || !proj.p.all_finite())
            throw TrainingError("distill_train: parameters diverged at step " +
                                std::to_string(step));

        log.push_back(eval_losses(step));
        if (!std::isfinite(log.back().loss_total))
            throw TrainingError("distill_train: loss diverged at step " + std::to_string(step));
    }
    return log;
}

void write_training_log(const std::vector<TrainRecord>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_training_log: cannot open " + path);
    out << "step,loss_task,loss_svd,loss_state,loss_feat,loss_total\n";
    char line[256];
    for (const TrainRecord& rec : log) {
        std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g,%.12g,%.12g,%.12g\n", rec.step,
                      rec.loss_task, rec.loss_svd, rec.loss_state, rec.loss_feat,
                      rec.loss_total);
        out << line;
    }
    if (!out) throw IoError("write_training_log: write failed for " + path);
}

}  // namespace lrss2d
