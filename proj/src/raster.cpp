#include "vocr/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace vocr {

double rect_iou(const Rect& a, const Rect& b) {
    const int ix = std::max(a.x, b.x);
    const int iy = std::max(a.y, b.y);
    const int ir = std::min(a.right(), b.right());
    const int ib = std::min(a.bottom(), b.bottom());
    if (ir <= ix || ib <= iy) return 0.0;
    const double inter = static_cast<double>(ir - ix) * (ib - iy);
    const double uni = static_cast<double>(a.area()) + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

std::uint8_t GrayImage::at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
}

Frame Frame::make_gray(int index, int w, int h, std::uint8_t fill) {
    Frame f;
    f.index = index;
    f.width = w;
    f.height = h;
    f.kind = Kind::gray;
    f.pixels.assign(static_cast<std::size_t>(w) * h, fill);
    f.validate();
    return f;
}

Frame Frame::make_color(int index, int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Frame f;
    f.index = index;
    f.width = w;
    f.height = h;
    f.kind = Kind::color;
    f.pixels.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < f.pixels.size(); i += 3) {
        f.pixels[i] = r;
        f.pixels[i + 1] = g;
        f.pixels[i + 2] = b;
    }
    f.validate();
    return f;
}

std::uint8_t Frame::gray_at(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * channels();
    if (!is_color()) return pixels[i];
    const double v = 0.299 * pixels[i] + 0.587 * pixels[i + 1] + 0.114 * pixels[i + 2];
    return static_cast<std::uint8_t>(std::lround(v));
}

void Frame::set_gray(int x, int y, std::uint8_t v) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * channels();
    if (is_color()) {
        pixels[i] = pixels[i + 1] = pixels[i + 2] = v;
    } else {
        pixels[i] = v;
    }
}

void Frame::rgb_at(int x, int y, std::uint8_t rgb[3]) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * channels();
    if (is_color()) {
        rgb[0] = pixels[i];
        rgb[1] = pixels[i + 1];
        rgb[2] = pixels[i + 2];
    } else {
        rgb[0] = rgb[1] = rgb[2] = pixels[i];
    }
}

void Frame::set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * channels();
    if (is_color()) {
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    } else {
        pixels[i] = static_cast<std::uint8_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
    }
}

void Frame::validate() const {
    if (width < 1 || height < 1) throw UsageError("frame dimensions must be positive");
    if (index < 0) throw UsageError("frame index must be nonnegative");
    const std::size_t expect = static_cast<std::size_t>(width) * height * channels();
    if (pixels.size() != expect) throw UsageError("frame pixel buffer has wrong length");
}

GrayImage to_gray(const Frame& frame) {
    frame.validate();
    GrayImage out(frame.width, frame.height);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) out.at(x, y) = frame.gray_at(x, y);
    return out;
}

GrayImage red_channel(const Frame& frame) {
    frame.validate();
    GrayImage out(frame.width, frame.height);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            std::uint8_t rgb[3];
            frame.rgb_at(x, y, rgb);
            out.at(x, y) = rgb[0];
        }
    return out;
}

void check_rect_in(const Rect& rect, int width, int height) {
    if (rect.w < 1 || rect.h < 1) throw BoundsError("rect dimensions must be positive");
    if (rect.x < 0 || rect.y < 0 || rect.right() > width || rect.bottom() > height)
        throw BoundsError("rect outside raster bounds");
}

Frame crop(const Frame& frame, const Rect& rect) {
    frame.validate();
    check_rect_in(rect, frame.width, frame.height);
    Frame out;
    out.index = frame.index;
    out.width = rect.w;
    out.height = rect.h;
    out.kind = frame.kind;
    out.pixels.resize(static_cast<std::size_t>(rect.w) * rect.h * frame.channels());
    const std::size_t ch = frame.channels();
    for (int j = 0; j < rect.h; ++j) {
        const std::uint8_t* src =
            frame.pixels.data() + ((static_cast<std::size_t>(rect.y + j) * frame.width) + rect.x) * ch;
        std::uint8_t* dst = out.pixels.data() + static_cast<std::size_t>(j) * rect.w * ch;
        std::copy(src, src + static_cast<std::size_t>(rect.w) * ch, dst);
    }
    return out;
}

GrayImage crop_gray(const GrayImage& img, const Rect& rect) {
    check_rect_in(rect, img.width, img.height);
    GrayImage out(rect.w, rect.h);
    for (int j = 0; j < rect.h; ++j)
        for (int i = 0; i < rect.w; ++i) out.at(i, j) = img.at(rect.x + i, rect.y + j);
    return out;
}

GrayImage translate_sample(const GrayImage& img, int dx, int dy, const Rect& rect) {
    Rect shifted{rect.x + dx, rect.y + dy, rect.w, rect.h};
    check_rect_in(shifted, img.width, img.height);
    return crop_gray(img, shifted);
}

GrayImage invert(const GrayImage& img) {
    GrayImage out = img;
    for (auto& v : out.values) v = static_cast<std::uint8_t>(255 - v);
    return out;
}

Frame invert(const Frame& frame) {
    Frame out = frame;
    for (auto& v : out.pixels) v = static_cast<std::uint8_t>(255 - v);
    return out;
}

// --- PNM I/O ------------------------------------------------------------

namespace {

int read_pnm_token(std::istream& in) {
    // Skips whitespace and '#' comments, per the PNM spec.
    while (true) {
        int c = in.peek();
        if (c == EOF) throw FormatError("unexpected end of PNM header");
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw FormatError("bad integer in PNM header");
    return value;
}

std::string read_magic(std::istream& in, const std::filesystem::path& path) {
    std::string magic;
    in >> magic;
    if (!in) throw FormatError("cannot read PNM magic: " + path.string());
    return magic;
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.values.data()),
              static_cast<std::streamsize>(img.values.size()));
    if (!out) throw FormatError("write failed: " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path.string());
    const std::string magic = read_magic(in, path);
    if (magic != "P5") throw FormatError("not a binary PGM: " + path.string());
    const int w = read_pnm_token(in);
    const int h = read_pnm_token(in);
    const int maxval = read_pnm_token(in);
    if (w < 1 || h < 1 || maxval != 255) throw FormatError("unsupported PGM: " + path.string());
    in.get();  // single whitespace after maxval
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.values.data()),
            static_cast<std::streamsize>(img.values.size()));
    if (!in) throw FormatError("truncated PGM: " + path.string());
    return img;
}

void write_pnm_frame(const std::filesystem::path& path, const Frame& frame) {
    frame.validate();
    if (!frame.is_color()) {
        GrayImage g(frame.width, frame.height);
        g.values = frame.pixels;
        write_pgm(path, g);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw FormatError("write failed: " + path.string());
}

Frame read_pnm_frame(const std::filesystem::path& path, int index) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path.string());
    const std::string magic = read_magic(in, path);
    if (magic != "P5" && magic != "P6") throw FormatError("not a P5/P6 PNM: " + path.string());
    const int w = read_pnm_token(in);
    const int h = read_pnm_token(in);
    const int maxval = read_pnm_token(in);
    if (w < 1 || h < 1 || maxval != 255) throw FormatError("unsupported PNM: " + path.string());
    in.get();
    Frame f;
    f.index = index;
    f.width = w;
    f.height = h;
    f.kind = magic == "P6" ? Frame::Kind::color : Frame::Kind::gray;
    f.pixels.resize(static_cast<std::size_t>(w) * h * f.channels());
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (!in) throw FormatError("truncated PNM: " + path.string());
    return f;
}

void write_pbm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& bits) {
    if (bits.size() != static_cast<std::size_t>(width) * height)
        throw UsageError("PBM bit buffer has wrong length");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path.string());
    out << "P4\n" << width << " " << height << "\n";
    const int row_bytes = (width + 7) / 8;
    std::vector<std::uint8_t> row(row_bytes);
    for (int y = 0; y < height; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < width; ++x)
            if (bits[static_cast<std::size_t>(y) * width + x])
                row[x >> 3] |= static_cast<std::uint8_t>(0x80u >> (x & 7));
        out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
    }
    if (!out) throw FormatError("write failed: " + path.string());
}

std::vector<std::uint8_t> read_pbm(const std::filesystem::path& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path.string());
    const std::string magic = read_magic(in, path);
    if (magic != "P4") throw FormatError("not a binary PBM: " + path.string());
    width = read_pnm_token(in);
    height = read_pnm_token(in);
    if (width < 1 || height < 1) throw FormatError("bad PBM dimensions: " + path.string());
    in.get();
    const int row_bytes = (width + 7) / 8;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height, 0);
    std::vector<std::uint8_t> row(row_bytes);
    for (int y = 0; y < height; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), row_bytes);
        if (!in) throw FormatError("truncated PBM: " + path.string());
        for (int x = 0; x < width; ++x)
            bits[static_cast<std::size_t>(y) * width + x] =
                (row[x >> 3] >> (7 - (x & 7))) & 1u;
    }
    return bits;
}

std::string frame_filename(int index, bool color) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.%s", index, color ? "ppm" : "pgm");
    return buf;
}

std::vector<Frame> read_frame_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
    std::map<int, fs::path> ordered;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        int idx = -1;
        char ext[8] = {0};
        if (std::sscanf(name.c_str(), "frame_%d.%3s", &idx, ext) == 2 &&
            (std::string(ext) == "pgm" || std::string(ext) == "ppm")) {
            ordered[idx] = entry.path();
        }
    }
    std::vector<Frame> frames;
    frames.reserve(ordered.size());
    for (const auto& [idx, path] : ordered) frames.push_back(read_pnm_frame(path, idx));
    return frames;
}

}  // namespace vocr
