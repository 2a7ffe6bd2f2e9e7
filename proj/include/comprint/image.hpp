#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "comprint/errors.hpp"

namespace comprint {

// Single-channel raster of real-valued samples, row major. Luminance images
// live in [0, 255]; the same container also carries fingerprints and other
// real-valued fields, which are unconstrained apart from finiteness.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> samples;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw InvalidArgument("GrayImage: non-positive dimensions");
    }

    float& at(int y, int x) { return samples[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return samples[static_cast<std::size_t>(y) * width + x]; }

    std::size_t pixel_count() const { return samples.size(); }

    bool all_finite() const {
        for (float v : samples)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline GrayImage crop(const GrayImage& img, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > img.width || y0 + h > img.height)
        throw InvalidArgument("crop: window outside image bounds");
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        std::copy_n(&img.samples[static_cast<std::size_t>(y0 + y) * img.width + x0], w,
                    &out.samples[static_cast<std::size_t>(y) * w]);
    return out;
}

// Largest centered window whose sides are multiples of `mult`.
inline GrayImage center_crop_multiple(const GrayImage& img, int mult) {
    const int w = (img.width / mult) * mult;
    const int h = (img.height / mult) * mult;
    if (w == 0 || h == 0)
        throw InvalidArgument("center_crop_multiple: image smaller than one block");
    return crop(img, (img.width - w) / 2, (img.height - h) / 2, w, h);
}

// Bilinear resampling with the half-pixel-center convention.
inline GrayImage resize_bilinear(const GrayImage& img, int out_w, int out_h) {
    if (out_w <= 0 || out_h <= 0) throw InvalidArgument("resize_bilinear: bad target size");
    GrayImage out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = (1.0 - wx) * img.at(y0, x0) + wx * img.at(y0, x1);
            const double bot = (1.0 - wx) * img.at(y1, x0) + wx * img.at(y1, x1);
            out.at(y, x) = static_cast<float>((1.0 - wy) * top + wy * bot);
        }
    }
    return out;
}

inline GrayImage from_bytes(const std::vector<std::uint8_t>& px, int w, int h) {
    GrayImage out(w, h);
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = px[i];
    return out;
}

inline std::vector<std::uint8_t> to_bytes(const GrayImage& img) {
    std::vector<std::uint8_t> px(img.pixel_count());
    for (std::size_t i = 0; i < px.size(); ++i) {
        const float v = std::clamp(img.samples[i], 0.0f, 255.0f);
        px[i] = static_cast<std::uint8_t>(std::lround(v));
    }
    return px;
}

}  // namespace comprint
