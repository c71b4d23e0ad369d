#pragma once

#include "fracmorph/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fracmorph {

/// Row-major single-channel image.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}
    Raster(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using GrayImage = Raster<float>;
using LabelImage = Raster<std::uint8_t>;

struct ImageSize {
    int width = 0;
    int height = 0;
};

/// Reads only the PNG header.
ImageSize read_png_size(const std::filesystem::path& path);

/// Raw 8-bit sample values of a grayscale or palette PNG; palette indices
/// are returned unexpanded. Other formats raise ImageError.
LabelImage read_label_png(const std::filesystem::path& path);

/// Any PNG converted to one grayscale channel, values in [0,255].
GrayImage read_gray_png(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG; values are rounded and clamped to [0,255].
void write_gray_png(const std::filesystem::path& path, const GrayImage& image);
void write_label_png(const std::filesystem::path& path, const LabelImage& image);

struct PatchSpec {
    int width = 96;
    int height = 96;
};

/// Bilinear resize with the corner-aligned convention: output pixel i maps
/// to source coordinate i*(in-1)/(out-1), so the four corner pixels of the
/// input and output coincide. A one-pixel output axis samples the centre.
GrayImage resize_bilinear(const GrayImage& src, int out_width, int out_height);

/// Crops `rect` (clipped to the image) and resizes it to `spec`.
/// Throws EmptyCrop if nothing remains after clipping.
GrayImage crop_and_resize(const GrayImage& image, const PixelRect& rect, const PatchSpec& spec);

}  // namespace fracmorph
