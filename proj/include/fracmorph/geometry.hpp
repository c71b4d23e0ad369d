#pragma once

namespace fracmorph {

/// Axis-aligned box in pixel space, corners (x0,y0) top-left and (x1,y1)
/// bottom-right. Area is (x1-x0)*(y1-y0).
struct PixelBox {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    double area() const noexcept { return width() > 0 && height() > 0 ? width() * height() : 0.0; }

    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

/// Integer half-open pixel rectangle [x0,x1) x [y0,y1).
struct PixelRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const noexcept { return x1 - x0; }
    int height() const noexcept { return y1 - y0; }
    bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }

    PixelRect clipped(int image_width, int image_height) const noexcept;
    PixelBox as_box() const noexcept { return {double(x0), double(y0), double(x1), double(y1)}; }

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Box in normalized centre format, as found in one-stage detector label
/// files. All values are fractions of the image width/height.
struct BBox {
    double cx = 0, cy = 0, w = 0, h = 0;

    /// Corner box in pixels, clipped to the image.
    PixelBox to_pixels(int image_width, int image_height) const noexcept;

    /// Smallest integer rectangle covering to_pixels(), clipped to the image.
    /// `margin` is a fraction of the box size added on each side.
    PixelRect to_rect(int image_width, int image_height, double margin = 0.0) const noexcept;

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection over union; 0 when the union is empty.
double iou(const PixelBox& a, const PixelBox& b) noexcept;
double iou(const BBox& a, const BBox& b) noexcept;

}  // namespace fracmorph
