#include "fracmorph/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fracmorph {

PixelRect PixelRect::clipped(int image_width, int image_height) const noexcept {
    return {std::clamp(x0, 0, image_width), std::clamp(y0, 0, image_height), std::clamp(x1, 0, image_width),
            std::clamp(y1, 0, image_height)};
}

PixelBox BBox::to_pixels(int image_width, int image_height) const noexcept {
    const double W = image_width;
    const double H = image_height;
    return {std::clamp((cx - w / 2) * W, 0.0, W), std::clamp((cy - h / 2) * H, 0.0, H),
            std::clamp((cx + w / 2) * W, 0.0, W), std::clamp((cy + h / 2) * H, 0.0, H)};
}

PixelRect BBox::to_rect(int image_width, int image_height, double margin) const noexcept {
    BBox grown = *this;
    grown.w = w * (1.0 + 2.0 * margin);
    grown.h = h * (1.0 + 2.0 * margin);
    const auto px = grown.to_pixels(image_width, image_height);
    // Snap values within 1e-9 of an integer so exact label coordinates do not grow by a pixel.
    const auto lo = [](double v) { return static_cast<int>(std::floor(v + 1e-9)); };
    const auto hi = [](double v) { return static_cast<int>(std::ceil(v - 1e-9)); };
    return PixelRect{lo(px.x0), lo(px.y0), hi(px.x1), hi(px.y1)}.clipped(image_width, image_height);
}

double iou(const PixelBox& a, const PixelBox& b) noexcept {
    const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    const double inter = (ix > 0 && iy > 0) ? ix * iy : 0.0;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double iou(const BBox& a, const BBox& b) noexcept {
    const PixelBox pa{a.cx - a.w / 2, a.cy - a.h / 2, a.cx + a.w / 2, a.cy + a.h / 2};
    const PixelBox pb{b.cx - b.w / 2, b.cy - b.h / 2, b.cx + b.w / 2, b.cy + b.h / 2};
    return iou(pa, pb);
}

}  // namespace fracmorph
