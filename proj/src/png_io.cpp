#include "fracmorph/errors.hpp"
#include "fracmorph/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace fracmorph {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        if (mode[0] == 'r') throw MissingFile(path.string());
        throw ImageError("cannot open " + path.string() + " for writing");
    }
    return f;
}

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
    auto* what = static_cast<std::string*>(png_get_error_ptr(png));
    if (what) *what = msg;
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

/// Owns a libpng read struct. Decoding runs in `decode`, which must not hold
/// objects with non-trivial destructors across the setjmp boundary.
class PngReader {
public:
    explicit PngReader(const std::filesystem::path& path) : path_(path), file_(open_file(path, "rb")) {
        unsigned char sig[8] = {};
        if (std::fread(sig, 1, 8, file_.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
            throw ImageError(path.string() + ": not a PNG file");
        }
        png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message_, on_png_error, on_png_warning);
        info_ = png_ ? png_create_info_struct(png_) : nullptr;
        if (!png_ || !info_) {
            png_destroy_read_struct(&png_, &info_, nullptr);
            throw ImageError("libpng initialisation failed");
        }
        png_init_io(png_, file_.get());
        png_set_sig_bytes(png_, 8);
    }

    ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }

    PngReader(const PngReader&) = delete;
    PngReader& operator=(const PngReader&) = delete;

    png_structp png() const { return png_; }
    png_infop info() const { return info_; }

    [[noreturn]] void fail() const { throw ImageError(path_.string() + ": " + message_); }
    [[noreturn]] void fail(const std::string& reason) const { throw ImageError(path_.string() + ": " + reason); }

private:
    std::filesystem::path path_;
    FilePtr file_;
    std::string message_;
    png_structp png_ = nullptr;
    png_infop info_ = nullptr;
};

bool read_header(png_structp png, png_infop info) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_info(png, info);
    return true;
}

bool read_rows(png_structp png, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    return true;
}

bool update_info(png_structp png, png_infop info) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_update_info(png, info);
    return true;
}

std::vector<std::uint8_t> read_all_rows(PngReader& r, int width, int height) {
    const auto rowbytes = png_get_rowbytes(r.png(), r.info());
    if (rowbytes != static_cast<png_size_t>(width)) {
        r.fail("unexpected row size after conversion");
    }
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * width;
    if (!read_rows(r.png(), rows.data())) r.fail();
    return data;
}

bool write_rows(png_structp png, png_infop info, int width, int height, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

void write_bytes(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& data) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto file = open_file(path, "wb");
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, on_png_error, on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw ImageError("libpng initialisation failed");
    }
    png_init_io(png, file.get());
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(data.data() + static_cast<std::size_t>(y) * width);
    }
    const bool ok = write_rows(png, info, width, height, rows.data());
    png_destroy_write_struct(&png, &info);
    if (!ok) throw ImageError(path.string() + ": " + message);
}

}  // namespace

ImageSize read_png_size(const std::filesystem::path& path) {
    PngReader r(path);
    if (!read_header(r.png(), r.info())) r.fail();
    return {static_cast<int>(png_get_image_width(r.png(), r.info())),
            static_cast<int>(png_get_image_height(r.png(), r.info()))};
}

LabelImage read_label_png(const std::filesystem::path& path) {
    PngReader r(path);
    if (!read_header(r.png(), r.info())) r.fail();
    const int width = static_cast<int>(png_get_image_width(r.png(), r.info()));
    const int height = static_cast<int>(png_get_image_height(r.png(), r.info()));
    const int depth = png_get_bit_depth(r.png(), r.info());
    const int color = png_get_color_type(r.png(), r.info());
    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE) {
        r.fail("label image must be single-channel grayscale or palette");
    }
    if (depth == 16) {
        r.fail("label image must have at most 8 bits per sample");
    }
    if (depth < 8) png_set_packing(r.png());
    if (!update_info(r.png(), r.info())) r.fail();
    return LabelImage(width, height, read_all_rows(r, width, height));
}

GrayImage read_gray_png(const std::filesystem::path& path) {
    PngReader r(path);
    if (!read_header(r.png(), r.info())) r.fail();
    const int width = static_cast<int>(png_get_image_width(r.png(), r.info()));
    const int height = static_cast<int>(png_get_image_height(r.png(), r.info()));
    const int depth = png_get_bit_depth(r.png(), r.info());
    const int color = png_get_color_type(r.png(), r.info());

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png());
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(r.png());
    if (depth == 16) png_set_strip_16(r.png());
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(r.png());
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE) {
        png_set_rgb_to_gray_fixed(r.png(), 1, -1, -1);
    }
    if (!update_info(r.png(), r.info())) r.fail();

    const auto bytes = read_all_rows(r, width, height);
    std::vector<float> values(bytes.begin(), bytes.end());
    return GrayImage(width, height, std::move(values));
}

void write_gray_png(const std::filesystem::path& path, const GrayImage& image) {
    std::vector<std::uint8_t> data(image.pixels().size());
    std::transform(image.pixels().begin(), image.pixels().end(), data.begin(), [](float v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    });
    write_bytes(path, image.width(), image.height(), data);
}

void write_label_png(const std::filesystem::path& path, const LabelImage& image) {
    write_bytes(path, image.width(), image.height(),
                std::vector<std::uint8_t>(image.pixels().begin(), image.pixels().end()));
}

}  // namespace fracmorph
