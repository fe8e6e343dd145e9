#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vocr/common.hpp"

namespace vocr {

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    int right() const { return x + w; }
    int bottom() const { return y + h; }
    long area() const { return static_cast<long>(w) * h; }
    bool contains(int px, int py) const {
        return px >= x && px < right() && py >= y && py < bottom();
    }
};

double rect_iou(const Rect& a, const Rect& b);

// 8-bit gray raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    // Clamped access, used for edge-replication padding.
    std::uint8_t at_clamped(int x, int y) const;
};

// Real-valued raster for intermediate maps (edge magnitudes, correlation
// scores). Value range is documented by each producer.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    FloatImage() = default;
    FloatImage(int w, int h, float fill = 0.f)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    float at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    float& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

// One video frame: gray (1 byte/px) or RGB color (3 bytes/px interleaved),
// plus the frame index that stands in for a timestamp.
struct Frame {
    enum class Kind { gray, color };

    int index = 0;
    int width = 0;
    int height = 0;
    Kind kind = Kind::gray;
    std::vector<std::uint8_t> pixels;

    static Frame make_gray(int index, int w, int h, std::uint8_t fill = 0);
    static Frame make_color(int index, int w, int h, std::uint8_t r = 0, std::uint8_t g = 0,
                            std::uint8_t b = 0);

    bool is_color() const { return kind == Kind::color; }
    std::size_t channels() const { return is_color() ? 3 : 1; }

    std::uint8_t gray_at(int x, int y) const;  // luma for color frames
    void set_gray(int x, int y, std::uint8_t v);
    void rgb_at(int x, int y, std::uint8_t rgb[3]) const;
    void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    void validate() const;  // throws UsageError on inconsistent fields
};

// BT.601 luma, round-half-up. Identity on gray frames.
GrayImage to_gray(const Frame& frame);

// Red channel of a color frame (gray frames pass through); the color-based
// detection variant feeds this to the edge detector instead of luma.
GrayImage red_channel(const Frame& frame);

Frame crop(const Frame& frame, const Rect& rect);
GrayImage crop_gray(const GrayImage& img, const Rect& rect);

// Sample `rect` shifted by (dx, dy). Shifted rect must be in bounds.
GrayImage translate_sample(const GrayImage& img, int dx, int dy, const Rect& rect);

GrayImage invert(const GrayImage& img);
Frame invert(const Frame& frame);

void check_rect_in(const Rect& rect, int width, int height);

// --- PNM I/O ------------------------------------------------------------
//
// Gray frames travel as binary PGM (P5), color as binary PPM (P6), masks
// and binary text images as PBM (P4, bit 1 = black = text).

void write_pgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

void write_pnm_frame(const std::filesystem::path& path, const Frame& frame);
Frame read_pnm_frame(const std::filesystem::path& path, int index);

// `bits` is one byte per pixel, 0 or 1.
void write_pbm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> read_pbm(const std::filesystem::path& path, int& width, int& height);

// Frame files are named frame_%06d.pgm / frame_%06d.ppm; the number is the
// frame index and defines sequence order.
std::string frame_filename(int index, bool color);
std::vector<Frame> read_frame_dir(const std::filesystem::path& dir);

}  // namespace vocr
