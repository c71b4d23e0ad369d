#include "fracmorph/errors.hpp"
#include "fracmorph/raster.hpp"

#include <cmath>
#include <string>

namespace fracmorph {

namespace {

struct Tap {
    int lo;
    int hi;
    double frac;
};

std::vector<Tap> taps(int in, int out) {
    std::vector<Tap> t(static_cast<std::size_t>(out));
    for (int i = 0; i < out; ++i) {
        const double src = out == 1 ? (in - 1) / 2.0 : static_cast<double>(i) * (in - 1) / (out - 1);
        int lo = static_cast<int>(std::floor(src));
        if (lo >= in - 1) lo = std::max(in - 2, 0);
        const int hi = std::min(lo + 1, in - 1);
        t[static_cast<std::size_t>(i)] = {lo, hi, hi == lo ? 0.0 : src - lo};
    }
    return t;
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height) {
    if (src.width() <= 0 || src.height() <= 0) {
        throw EmptyCrop("cannot resize an empty image");
    }
    if (out_width <= 0 || out_height <= 0) {
        throw Error("target size must be positive");
    }
    if (src.width() == out_width && src.height() == out_height) {
        return src;
    }

    const auto tx = taps(src.width(), out_width);
    const auto ty = taps(src.height(), out_height);

    GrayImage out(out_width, out_height);
    for (int y = 0; y < out_height; ++y) {
        const auto& vy = ty[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_width; ++x) {
            const auto& vx = tx[static_cast<std::size_t>(x)];
            // a + (b - a) * t keeps constant regions bit-exact.
            const double a = src.at(vx.lo, vy.lo);
            const double b = src.at(vx.hi, vy.lo);
            const double c = src.at(vx.lo, vy.hi);
            const double d = src.at(vx.hi, vy.hi);
            const double top = a + (b - a) * vx.frac;
            const double bottom = c + (d - c) * vx.frac;
            out.at(x, y) = static_cast<float>(top + (bottom - top) * vy.frac);
        }
    }
    return out;
}

GrayImage crop_and_resize(const GrayImage& image, const PixelRect& rect, const PatchSpec& spec) {
    const auto r = rect.clipped(image.width(), image.height());
    if (r.empty()) {
        throw EmptyCrop("crop rectangle is empty after clipping");
    }
    GrayImage crop(r.width(), r.height());
    for (int y = 0; y < r.height(); ++y) {
        for (int x = 0; x < r.width(); ++x) {
            crop.at(x, y) = image.at(r.x0 + x, r.y0 + y);
        }
    }
    return resize_bilinear(crop, spec.width, spec.height);
}

}  // namespace fracmorph
