#include "lrss2d/ss2d.hpp"

#include <algorithm>
#include <string>

#include "lrss2d/errors.hpp"

namespace lrss2d {

std::vector<std::pair<std::size_t, std::size_t>> flatten_path(std::size_t h, std::size_t w,
                                                              ScanDirection dir) {
    if (h < 1 || w < 1)
        throw ArgumentError("flatten_path: grid must be at least 1x1, got " +
                            std::to_string(h) + "x" + std::to_string(w));
    std::vector<std::pair<std::size_t, std::size_t>> path;
    path.reserve(h * w);
    switch (dir) {
        case ScanDirection::RowForward:
        case ScanDirection::RowBackward:
            for (std::size_t r = 0; r < h; ++r)
                for (std::size_t c = 0; c < w; ++c) path.emplace_back(r, c);
            break;
        case ScanDirection::ColForward:
        case ScanDirection::ColBackward:
            for (std::size_t c = 0; c < w; ++c)
                for (std::size_t r = 0; r < h; ++r) path.emplace_back(r, c);
            break;
    }
    if (dir == ScanDirection::RowBackward || dir == ScanDirection::ColBackward)
        std::reverse(path.begin(), path.end());
    return path;
}

FeatureMap pixel_fuse(const FeatureMap& iv, const FeatureMap& ii, const FusionMixer& m) {
    if (iv.height() != ii.height() || iv.width() != ii.width() ||
        iv.channels() != ii.channels())
        throw ShapeError("pixel_fuse: modality shapes differ, " + std::to_string(iv.height()) +
                         "x" + std::to_string(iv.width()) + "x" + std::to_string(iv.channels()) +
                         " vs " + std::to_string(ii.height()) + "x" + std::to_string(ii.width()) +
                         "x" + std::to_string(ii.channels()));
    const std::size_t c = iv.channels();
    if (m.w_f.cols() != 2 * c)
        throw ShapeError("pixel_fuse: mixer expects " + std::to_string(m.w_f.cols() / 2) +
                         " input channels, maps have " + std::to_string(c));
    const std::size_t c_out = m.w_f.rows();

    FeatureMap out(iv.height(), iv.width(), c_out);
    for (std::size_t r = 0; r < iv.height(); ++r) {
        for (std::size_t col = 0; col < iv.width(); ++col) {
            for (std::size_t oc = 0; oc < c_out; ++oc) {
                double acc = 0.0;
                for (std::size_t k = 0; k < c; ++k) acc += m.w_f(oc, k) * iv.at(r, col, k);
                for (std::size_t k = 0; k < c; ++k) acc += m.w_f(oc, c + k) * ii.at(r, col, k);
                out.at(r, col, oc) = acc;
            }
        }
    }
    return out;
}

Ss2dLayer Ss2dLayer::make_teacher(std::size_t state_dim, std::size_t channels, Rng& rng) {
    Ss2dLayer layer;
    layer.state_dim = state_dim;
    layer.channels = channels;
    for (auto& direction : layer.systems) {
        direction.reserve(channels);
        for (std::size_t ch = 0; ch < channels; ++ch) {
            const ContinuousSsm ssm = ContinuousSsm::random_stable(state_dim, rng);
            SelectiveDelta delta{Matrix::zeros(1, 1), 0.0};
            const DiscreteSsm d = discretize_zoh(ssm, softplus(delta.bias));
            direction.push_back(ChannelSystem{d.a_bar, d.b_bar, d.c, std::move(delta)});
        }
    }
    return layer;
}

Ss2dLayer Ss2dLayer::make_student(const Ss2dLayer& teacher, std::size_t rank) {
    Ss2dLayer layer;
    layer.state_dim = teacher.state_dim;
    layer.channels = teacher.channels;
    for (std::size_t dir = 0; dir < 4; ++dir) {
        layer.systems[dir].reserve(teacher.channels);
        for (const ChannelSystem& sys : teacher.systems[dir]) {
            const Matrix* a_bar = std::get_if<Matrix>(&sys.transition);
            if (!a_bar)
                throw ArgumentError("make_student: teacher layer must be full-rank");
            layer.systems[dir].push_back(ChannelSystem{init_from_teacher(*a_bar, rank),
                                                       sys.b_bar, sys.c, sys.delta});
        }
    }
    return layer;
}

Ss2dResult ss2d_forward(const FeatureMap& f, const Ss2dLayer& layer) {
    if (layer.channels != f.channels())
        throw ShapeError("ss2d_forward: layer has " + std::to_string(layer.channels) +
                         " channels, map has " + std::to_string(f.channels()));
    const std::size_t h = f.height(), w = f.width(), c = f.channels();
    const std::size_t len = h * w;

    Ss2dResult result;
    result.output = FeatureMap(h, w, c);
    std::vector<double> sequence(len);

    for (std::size_t dir = 0; dir < 4; ++dir) {
        const auto path = flatten_path(h, w, kAllDirections[dir]);
        auto& trajectories = result.trajectories.per_direction[dir];
        trajectories.reserve(c);
        for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t k = 0; k < len; ++k)
                sequence[k] = f.at(path[k].first, path[k].second, ch);

            const ChannelSystem& sys = layer.systems[dir][ch];
            StateTrajectory traj;
            if (const auto* factors = std::get_if<LowRankTransition>(&sys.transition)) {
                traj = lowrank_scan(*factors, sys.b_bar, sys.c, sequence);
            } else {
                const DiscreteSsm d{std::get<Matrix>(sys.transition), sys.b_bar, sys.c};
                traj = scan_1d(d, sequence);
            }
            for (std::size_t k = 0; k < len; ++k)
                result.output.at(path[k].first, path[k].second, ch) += traj.outputs[k];
            trajectories.push_back(std::move(traj));
        }
    }
    return result;
}

FeatureMap residual_forward(const FeatureMap& f, const Ss2dLayer& layer) {
    FeatureMap out = ss2d_forward(f, layer).output;
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += f.data()[i];
    return out;
}

}  // namespace lrss2d
