#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace fdwm {

/// Real-valued h×w×d sample with pixels in [0,1].
///
/// Storage is planar (channel-major): index = (c*height + y)*width + x.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int h, int w, int d, double fill = 0.0)
        : height(h), width(w), channels(d),
          pixels(static_cast<std::size_t>(h) * w * d, fill) {}

    double& at(int c, int y, int x) {
        return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    std::span<double> channel(int c) {
        return {pixels.data() + static_cast<std::size_t>(c) * height * width,
                static_cast<std::size_t>(height) * width};
    }
    std::span<const double> channel(int c) const {
        return {pixels.data() + static_cast<std::size_t>(c) * height * width,
                static_cast<std::size_t>(height) * width};
    }

    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    /// Throws std::invalid_argument on out-of-range pixels or bad dims.
    void validate() const {
        if (height < 1 || width < 1)
            throw std::invalid_argument("image: height and width must be >= 1");
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("image: channel count must be 1 or 3");
        if (pixels.size() != static_cast<std::size_t>(height) * width * channels)
            throw std::invalid_argument("image: pixel buffer size mismatch");
        for (double p : pixels)
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("image: pixel outside [0,1]");
    }
};

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline void clip_in_place(Image& img) {
    for (double& p : img.pixels) p = clamp01(p);
}

/// Image plus its class label and a stable identifier assigned at ingestion.
/// Subset disjointness is tracked through the ids.
struct LabeledSample {
    Image image;
    int label = 0;
    std::int64_t id = -1;
};

}  // namespace fdwm
