#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "lrss2d/feature_map.hpp"
#include "lrss2d/lowrank.hpp"
#include "lrss2d/matrix.hpp"
#include "lrss2d/ssm.hpp"

namespace lrss2d {

// The four scan paths over a 2D grid.
enum class ScanDirection { RowForward, RowBackward, ColForward, ColBackward };

inline constexpr std::array<ScanDirection, 4> kAllDirections = {
    ScanDirection::RowForward, ScanDirection::RowBackward, ScanDirection::ColForward,
    ScanDirection::ColBackward};

// Bijective ordering of all h x w grid positions along one scan path.
// RowForward is row-major, ColForward column-major; the Backward variants
// are their exact reverses.
std::vector<std::pair<std::size_t, std::size_t>> flatten_path(std::size_t h, std::size_t w,
                                                              ScanDirection dir);

// Per-pixel linear channel mixer (no bias): out = w_f . concat(iv, ii).
struct FusionMixer {
    Matrix w_f;  // C_in x 2C
};

// Fuses two same-shape modalities pixel-wise; output has w_f.rows() channels.
FeatureMap pixel_fuse(const FeatureMap& iv, const FeatureMap& ii, const FusionMixer& m);

// One scalar-channel system inside a layer: the transition is either a
// dense NxN matrix or a low-rank factor pair; b_bar/c are the discretized
// input/output maps and delta keeps the (frozen) discretization parameters.
struct ChannelSystem {
    std::variant<Matrix, LowRankTransition> transition;
    Matrix b_bar;  // N x 1
    Matrix c;      // 1 x N
    SelectiveDelta delta;

    bool is_low_rank() const { return std::holds_alternative<LowRankTransition>(transition); }
};

// Four-direction layer: one independent system per (direction, channel).
struct Ss2dLayer {
    std::size_t state_dim = 0;
    std::size_t channels = 0;
    std::array<std::vector<ChannelSystem>, 4> systems;  // [direction][channel]

    // Full-rank teacher layer: each system is a seeded stable continuous
    // SSM discretized once at its (constant) delta = softplus(bias).
    static Ss2dLayer make_teacher(std::size_t state_dim, std::size_t channels, Rng& rng);
    // Low-rank student: every teacher transition replaced by its optimal
    // rank-r factors; b_bar, c and delta are copied unchanged.
    static Ss2dLayer make_student(const Ss2dLayer& teacher, std::size_t rank);
};

// Hidden-state trajectories retained per (direction, channel) for
// distillation losses.
struct Ss2dTrajectories {
    std::array<std::vector<StateTrajectory>, 4> per_direction;
};

struct Ss2dResult {
    FeatureMap output;
    Ss2dTrajectories trajectories;
};

// Per channel and direction: gather the map along the path, run the scan,
// scatter outputs back through the inverse permutation; the final map is
// the fixed-order sum of the four directional maps.
Ss2dResult ss2d_forward(const FeatureMap& f, const Ss2dLayer& layer);

// Single residual block: input + ss2d_forward(input).
FeatureMap residual_forward(const FeatureMap& f, const Ss2dLayer& layer);

}  // namespace lrss2d
