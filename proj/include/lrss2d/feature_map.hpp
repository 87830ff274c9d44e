#pragma once

#include <cstddef>
#include <vector>

#include "lrss2d/rng.hpp"

namespace lrss2d {

// H x W x C spatial tensor, layout (row, col, channel).
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(std::size_t height, std::size_t width, std::size_t channels)
        : height_(height), width_(width), channels_(channels),
          data_(height * width * channels, 0.0) {}

    static FeatureMap random_normal(std::size_t h, std::size_t w, std::size_t c, Rng& rng,
                                    double scale = 1.0) {
        FeatureMap f(h, w, c);
        for (double& x : f.data_) x = scale * rng.normal();
        return f;
    }

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    std::size_t size() const { return data_.size(); }

    double& at(std::size_t row, std::size_t col, std::size_t ch) {
        return data_[(row * width_ + col) * channels_ + ch];
    }
    double at(std::size_t row, std::size_t col, std::size_t ch) const {
        return data_[(row * width_ + col) * channels_ + ch];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    FeatureMap transposed() const {
        FeatureMap t(width_, height_, channels_);
        for (std::size_t r = 0; r < height_; ++r)
            for (std::size_t c = 0; c < width_; ++c)
                for (std::size_t ch = 0; ch < channels_; ++ch)
                    t.at(c, r, ch) = at(r, c, ch);
        return t;
    }

    bool operator==(const FeatureMap& other) const = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

}  // namespace lrss2d
