#include "lrss2d/detect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "lrss2d/errors.hpp"

namespace lrss2d {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Stable confidence-descending order, ties keep insertion order.
std::vector<std::size_t> confidence_order(const std::vector<Detection>& dets) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].confidence > dets[b].confidence;
    });
    return order;
}

}  // namespace

std::vector<Detection> linear_head(const FeatureMap& features, const HeadWeights& weights) {
    const std::size_t c = features.channels();
    if (weights.w_box.rows() != 4 || weights.w_box.cols() != c)
        throw ShapeError("linear_head: w_box must be 4x" + std::to_string(c) + ", got " +
                         weights.w_box.shape_string());
    if (weights.w_cls.cols() != c || weights.w_cls.rows() < 1)
        throw ShapeError("linear_head: w_cls must be Kx" + std::to_string(c) + ", got " +
                         weights.w_cls.shape_string());
    if (weights.w_conf.rows() != 1 || weights.w_conf.cols() != c)
        throw ShapeError("linear_head: w_conf must be 1x" + std::to_string(c) + ", got " +
                         weights.w_conf.shape_string());
    if (weights.grid_rows < 1 || weights.grid_cols < 1 ||
        weights.grid_rows > features.height() || weights.grid_cols > features.width())
        throw ArgumentError("linear_head: grid " + std::to_string(weights.grid_rows) + "x" +
                            std::to_string(weights.grid_cols) + " does not fit a " +
                            std::to_string(features.height()) + "x" +
                            std::to_string(features.width()) + " map");

    const std::size_t num_classes = weights.w_cls.rows();
    std::vector<Detection> dets;
    dets.reserve(weights.grid_rows * weights.grid_cols);
    std::vector<double> pooled(c);

    for (std::size_t gr = 0; gr < weights.grid_rows; ++gr) {
        const std::size_t r0 = gr * features.height() / weights.grid_rows;
        const std::size_t r1 = (gr + 1) * features.height() / weights.grid_rows;
        for (std::size_t gc = 0; gc < weights.grid_cols; ++gc) {
            const std::size_t c0 = gc * features.width() / weights.grid_cols;
            const std::size_t c1 = (gc + 1) * features.width() / weights.grid_cols;

            std::fill(pooled.begin(), pooled.end(), 0.0);
            for (std::size_t r = r0; r < r1; ++r)
                for (std::size_t col = c0; col < c1; ++col)
                    for (std::size_t ch = 0; ch < c; ++ch) pooled[ch] += features.at(r, col, ch);
            const double count = static_cast<double>((r1 - r0) * (c1 - c0));
            for (double& v : pooled) v /= count;

            double raw[4];
            for (std::size_t k = 0; k < 4; ++k) {
                double acc = 0.0;
                for (std::size_t ch = 0; ch < c; ++ch) acc += weights.w_box(k, ch) * pooled[ch];
                raw[k] = acc;
            }
            const double cx = sigmoid(raw[0]);
            const double cy = sigmoid(raw[1]);
            const double half_w = 0.5 * sigmoid(raw[2]);
            const double half_h = 0.5 * sigmoid(raw[3]);

            Detection det;
            det.box = Box{clamp01(cx - half_w), clamp01(cy - half_h), clamp01(cx + half_w),
                          clamp01(cy + half_h)};

            int best_class = 0;
            double best_logit = -HUGE_VAL;
            for (std::size_t k = 0; k < num_classes; ++k) {
                double acc = 0.0;
                for (std::size_t ch = 0; ch < c; ++ch) acc += weights.w_cls(k, ch) * pooled[ch];
                if (acc > best_logit) {
                    best_logit = acc;
                    best_class = static_cast<int>(k);
                }
            }
            det.class_id = best_class;

            double conf_raw = 0.0;
            for (std::size_t ch = 0; ch < c; ++ch) conf_raw += weights.w_conf(0, ch) * pooled[ch];
            det.confidence = sigmoid(conf_raw);
            dets.push_back(det);
        }
    }
    return dets;
}

double iou(const Box& a, const Box& b) {
    const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni <= 0.0 ? 0.0 : inter / uni;
}

double task_loss(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts) {
    if (dets.empty() || gts.empty()) return 0.0;

    const std::vector<std::size_t> order = confidence_order(dets);
    std::vector<bool> used(gts.size(), false);
    double box_sum = 0.0;
    double cls_sum = 0.0;
    std::size_t matched = 0;

    for (std::size_t idx : order) {
        const Detection& det = dets[idx];
        std::size_t best = gts.size();
        double best_iou = 0.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (used[g]) continue;
            const double v = iou(det.box, gts[g].box);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best == gts.size()) continue;  // no overlapping ground truth left
        used[best] = true;
        ++matched;

        const Box& gb = gts[best].box;
        const double dx1 = det.box.x1 - gb.x1, dy1 = det.box.y1 - gb.y1;
        const double dx2 = det.box.x2 - gb.x2, dy2 = det.box.y2 - gb.y2;
        box_sum += (dx1 * dx1 + dy1 * dy1 + dx2 * dx2 + dy2 * dy2) / 4.0;

        const double p_correct =
            det.class_id == gts[best].class_id ? det.confidence : 1.0 - det.confidence;
        cls_sum += -std::log(std::max(p_correct, 1e-12));
    }
    if (matched == 0) return 0.0;
    return box_sum / static_cast<double>(matched) + cls_sum / static_cast<double>(matched);
}

PrCurve precision_recall(const std::vector<Detection>& dets,
                         const std::vector<GroundTruthBox>& gts, double iou_threshold) {
    PrCurve curve;
    if (dets.empty()) return curve;

    const std::vector<std::size_t> order = confidence_order(dets);
    std::vector<bool> used(gts.size(), false);
    const double total_gt = static_cast<double>(gts.size());

    std::size_t tp = 0, fp = 0;
    for (std::size_t idx : order) {
        const Detection& det = dets[idx];
        std::size_t best = gts.size();
        double best_iou = 0.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (used[g] || gts[g].class_id != det.class_id) continue;
            const double v = iou(det.box, gts[g].box);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best != gts.size() && best_iou > iou_threshold) {
            used[best] = true;
            ++tp;
        } else {
            ++fp;
        }
        curve.points.push_back(PrCurve::Point{
            det.confidence, static_cast<double>(tp) / static_cast<double>(tp + fp),
            total_gt == 0.0 ? 0.0 : static_cast<double>(tp) / total_gt});
    }
    return curve;
}

double average_precision(const PrCurve& curve) {
    const std::size_t n = curve.points.size();
    if (n == 0) return 0.0;

    // monotone precision envelope from the high-recall end
    std::vector<double> envelope(n);
    double running = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        running = std::max(running, curve.points[i].precision);
        envelope[i] = running;
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ap += (curve.points[i].recall - prev_recall) * envelope[i];
        prev_recall = curve.points[i].recall;
    }
    return ap;
}

double map50(const std::vector<Detection>& dets, const std::vector<GroundTruthBox>& gts,
             std::size_t num_classes) {
    double sum = 0.0;
    std::size_t classes_with_gt = 0;
    for (std::size_t cls = 0; cls < num_classes; ++cls) {
        const int id = static_cast<int>(cls);
        std::vector<GroundTruthBox> class_gts;
        for (const GroundTruthBox& g : gts)
            if (g.class_id == id) class_gts.push_back(g);
        if (class_gts.empty()) continue;
        std::vector<Detection> class_dets;
        for (const Detection& d : dets)
            if (d.class_id == id) class_dets.push_back(d);
        sum += average_precision(precision_recall(class_dets, class_gts, 0.5));
        ++classes_with_gt;
    }
    return classes_with_gt == 0 ? 0.0 : sum / static_cast<double>(classes_with_gt);
}

namespace {

struct ParsedLine {
    int class_id;
    Box box;
    double confidence;
    bool has_confidence;
};

bool parse_record(const std::string& line, ParsedLine& out) {
    std::string body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos) body.resize(hash);
    std::istringstream in(body);
    long long cls;
    if (!(in >> cls)) return false;  // blank or comment-only line
    if (cls < 0) throw std::runtime_error("negative class id");
    if (!(in >> out.box.x1 >> out.box.y1 >> out.box.x2 >> out.box.y2))
        throw std::runtime_error("expected class_id x1 y1 x2 y2 [confidence]");
    out.has_confidence = static_cast<bool>(in >> out.confidence);
    std::string trailing;
    if (in >> trailing) throw std::runtime_error("unexpected trailing field '" + trailing + "'");
    if (!out.box.valid()) throw std::runtime_error("box violates 0 <= x1 < x2 <= 1 ordering");
    if (out.has_confidence && (out.confidence < 0.0 || out.confidence > 1.0))
        throw std::runtime_error("confidence outside [0, 1]");
    out.class_id = static_cast<int>(cls);
    return true;
}

template <typename Record, typename Make>
std::vector<Record> load_records(const std::string& path, Make make) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Record> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        ParsedLine parsed;
        try {
            if (!parse_record(line, parsed)) continue;
        } catch (const std::exception& e) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(make(parsed));
    }
    return records;
}

}  // namespace

std::vector<Detection> load_detections(const std::string& path) {
    return load_records<Detection>(path, [](const ParsedLine& p) {
        return Detection{p.box, p.class_id, p.has_confidence ? p.confidence : 1.0};
    });
}

std::vector<GroundTruthBox> load_ground_truth(const std::string& path) {
    return load_records<GroundTruthBox>(
        path, [](const ParsedLine& p) { return GroundTruthBox{p.box, p.class_id}; });
}

}  // namespace lrss2d
