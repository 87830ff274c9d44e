#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lrss2d/feature_map.hpp"
#include "lrss2d/matrix.hpp"

namespace lrss2d {

// Axis-aligned box with coordinates normalized to [0, 1], x1 < x2, y1 < y2.
struct Box {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;

    double area() const { return (x2 - x1) * (y2 - y1); }
    bool valid() const {
        return x1 >= 0.0 && y1 >= 0.0 && x2 <= 1.0 && y2 <= 1.0 && x1 < x2 && y1 < y2;
    }
};

struct Detection {
    Box box;
    int class_id = 0;
    double confidence = 0.0;
};

struct GroundTruthBox {
    Box box;
    int class_id = 0;
};

// Cumulative (precision, recall) operating points along the descending
// confidence sweep; recall is non-decreasing.
struct PrCurve {
    struct Point {
        double confidence;
        double precision;
        double recall;
    };
    std::vector<Point> points;
};

// Linear stand-in for a decoupled detection head: one pooled feature vector
// per anchor cell, one linear map per branch.
struct HeadWeights {
    Matrix w_box;   // 4 x C
    Matrix w_cls;   // num_classes x C
    Matrix w_conf;  // 1 x C
    std::size_t grid_rows = 1;
    std::size_t grid_cols = 1;
};

// One detection per anchor cell: box center/extent via sigmoid-squashed
// linear outputs (clamped to the unit square, strictly ordered), class via
// argmax of the logits (ties to the lowest id), confidence via sigmoid.
std::vector<Detection> linear_head(const FeatureMap& features, const HeadWeights& weights);

// Intersection over union, in [0, 1].
double iou(const Box& a, const Box& b);

// Stand-in task loss: greedy confidence-descending IoU assignment, then
// mean squared box-coordinate error plus mean negative log-likelihood of
// the matched class probability (confidence if the class is right, its
// complement otherwise). Empty sets give 0.
double task_loss(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts);

// Descending-confidence sweep (ties by insertion order): each detection
// greedily matches the highest-IoU unmatched ground truth of its own class;
// a match with IoU > iou_threshold is a true positive, anything else a
// false positive. Recall is against all ground truths passed in.
PrCurve precision_recall(const std::vector<Detection>& dets,
                         const std::vector<GroundTruthBox>& gts, double iou_threshold = 0.5);

// Area under the monotone precision envelope (all-point interpolation).
double average_precision(const PrCurve& curve);

// Unweighted mean of per-class AP at IoU 0.5 over classes 0..num_classes-1
// that have at least one ground truth; 0 when no class has any.
double map50(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
             std::size_t num_classes);

// Text corpus format: one record per line,
//   class_id x1 y1 x2 y2 [confidence]
// with '#' starting a comment. Ground-truth loading ignores a trailing
// confidence column. Throws IoError naming the offending line.
std::vector<Detection> load_detections(const std::string& path);
std::vector<GroundTruthBox> load_ground_truth(const std::string& path);

}  // namespace lrss2d
