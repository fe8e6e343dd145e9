#include "vocr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace vocr {

int Rng::next_int(int lo, int hi) {
    // Modulo bias is irrelevant at our range sizes (< 2^8 against 2^32).
    return lo + static_cast<int>(next_u32() % static_cast<std::uint32_t>(hi - lo + 1));
}

double Rng::next_gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {

GrayImage box_blur_once(const GrayImage& img) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            int sum = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) sum += img.at_clamped(x + dx, y + dy);
            out.at(x, y) = static_cast<std::uint8_t>((sum + 4) / 9);
        }
    return out;
}

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

void add_noise(Frame& frame, double sigma, Rng& rng) {
    if (sigma <= 0.0) return;
    for (auto& v : frame.pixels) v = clamp_u8(v + rng.next_gauss() * sigma);
}

void blur_frame(Frame& frame, int radius) {
    if (radius <= 0) return;
    const std::size_t ch = frame.channels();
    for (std::size_t c = 0; c < ch; ++c) {
        GrayImage plane(frame.width, frame.height);
        for (std::size_t i = 0; i < plane.values.size(); ++i)
            plane.values[i] = frame.pixels[i * ch + c];
        for (int r = 0; r < radius; ++r) plane = box_blur_once(plane);
        for (std::size_t i = 0; i < plane.values.size(); ++i)
            frame.pixels[i * ch + c] = plane.values[i];
    }
}

void paint_background(Frame& frame, const SceneSpec& spec, int frame_no, Rng& rng) {
    switch (spec.background) {
        case BackgroundMode::solid: {
            const std::uint8_t g = spec.bg_hi;
            for (int y = 0; y < spec.height; ++y)
                for (int x = 0; x < spec.width; ++x) frame.set_rgb(x, y, g, g, g);
            break;
        }
        case BackgroundMode::hscroll: {
            // Brightness ramp scrolling 4 px per frame.
            const int span = std::max(1, spec.bg_hi - spec.bg_lo);
            for (int x = 0; x < spec.width; ++x) {
                const int phase = ((x + frame_no * 4) % spec.width + spec.width) % spec.width;
                const std::uint8_t g =
                    static_cast<std::uint8_t>(spec.bg_lo + span * phase / spec.width);
                for (int y = 0; y < spec.height; ++y) frame.set_rgb(x, y, g, g, g);
            }
            break;
        }
        case BackgroundMode::blocks: {
            const int bs = std::max(1, spec.block_size);
            const int step = std::max(1, spec.bg_step);
            const int levels = (spec.bg_hi - spec.bg_lo) / step;
            auto draw = [&]() {
                return static_cast<std::uint8_t>(spec.bg_lo + step * rng.next_int(0, levels));
            };
            const int bx = (spec.width + bs - 1) / bs;
            const int by = (spec.height + bs - 1) / bs;
            for (int j = 0; j < by; ++j)
                for (int i = 0; i < bx; ++i) {
                    std::uint8_t r, g, b;
                    if (spec.color) {
                        r = draw();
                        g = draw();
                        b = draw();
                    } else {
                        r = g = b = draw();
                    }
                    for (int y = j * bs; y < std::min((j + 1) * bs, spec.height); ++y)
                        for (int x = i * bs; x < std::min((i + 1) * bs, spec.width); ++x)
                            frame.set_rgb(x, y, r, g, b);
                }
            break;
        }
    }
}

}  // namespace

GrayImage degrade(const GrayImage& img, double noise_sigma, int blur_radius, std::uint64_t seed) {
    if (noise_sigma < 0) throw UsageError("noise sigma must be nonnegative");
    if (blur_radius < 0) throw UsageError("blur radius must be nonnegative");
    GrayImage out = img;
    for (int r = 0; r < blur_radius; ++r) out = box_blur_once(out);
    if (noise_sigma > 0) {
        Rng rng(seed);
        for (auto& v : out.values) v = clamp_u8(v + rng.next_gauss() * noise_sigma);
    }
    return out;
}

Rect centered_caption_rect(const SceneSpec& spec, const GlyphSet& glyphs, int pad) {
    const int tw = caption_width(spec.text, glyphs);
    const int th = spec.text.empty() ? 0 : glyphs.cell_height();
    Rect r{(spec.width - tw) / 2 - pad, (spec.height - th) / 2 - pad, tw + 2 * pad, th + 2 * pad};
    if (r.x < 0 || r.y < 0 || r.right() > spec.width || r.bottom() > spec.height)
        throw UsageError("caption does not fit in the frame");
    return r;
}

std::string corpus_id_for(const SceneSpec& spec) {
    // FNV-1a over the fields that define the scene.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (i * 8)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (char c : spec.text) mix(static_cast<std::uint64_t>(c));
    mix(spec.seed);
    mix(static_cast<std::uint64_t>(spec.frame_count));
    mix(static_cast<std::uint64_t>(spec.width) << 32 | static_cast<std::uint64_t>(spec.height));
    mix(static_cast<std::uint64_t>(spec.rect.x) << 32 | static_cast<std::uint64_t>(spec.rect.y));
    mix(static_cast<std::uint64_t>(spec.rect.w) << 32 | static_cast<std::uint64_t>(spec.rect.h));
    mix(static_cast<std::uint64_t>(spec.background));
    mix(static_cast<std::uint64_t>(std::llround(spec.noise_sigma * 1000)));
    mix(static_cast<std::uint64_t>(spec.blur_radius));
    mix(static_cast<std::uint64_t>(spec.bg_step) << 32 | static_cast<std::uint64_t>(spec.block_size));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::pair<std::vector<Frame>, GroundTruth> synth_sequence(const SceneSpec& spec,
                                                          const GlyphSet& glyphs) {
    if (spec.frame_count < 1) throw UsageError("frame count must be >= 1");
    if (spec.width < 1 || spec.height < 1) throw UsageError("frame dimensions must be positive");

    auto [caption, cap_mask] = render_caption(spec.text, glyphs, spec.fg);
    const int tw = caption.width;
    const int th = caption.height;
    if (tw > spec.rect.w || th > spec.rect.h)
        throw UsageError("caption rect too small for rendered text");
    check_rect_in(spec.rect, spec.width, spec.height);
    const int ox = spec.rect.x + (spec.rect.w - tw) / 2;
    const int oy = spec.rect.y + (spec.rect.h - th) / 2;

    GroundTruth truth;
    truth.transcript = spec.text;
    truth.rect = spec.rect;
    truth.frame_count = spec.frame_count;
    truth.width = spec.width;
    truth.height = spec.height;
    truth.mask.assign(static_cast<std::size_t>(spec.width) * spec.height, 0);
    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x)
            if (cap_mask[static_cast<std::size_t>(y) * tw + x])
                truth.mask[static_cast<std::size_t>(oy + y) * spec.width + ox + x] = 1;
    truth.corpus_id = corpus_id_for(spec);

    Rng rng(spec.seed);
    std::vector<Frame> frames;
    frames.reserve(spec.frame_count);
    for (int f = 0; f < spec.frame_count; ++f) {
        Frame frame = spec.color ? Frame::make_color(f, spec.width, spec.height)
                                 : Frame::make_gray(f, spec.width, spec.height);
        paint_background(frame, spec, f, rng);
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x)
                if (truth.mask[static_cast<std::size_t>(y) * spec.width + x])
                    frame.set_rgb(x, y, spec.fg, spec.fg, spec.fg);
        blur_frame(frame, spec.blur_radius);
        add_noise(frame, spec.noise_sigma, rng);
        frames.push_back(std::move(frame));
    }
    return {std::move(frames), std::move(truth)};
}

void write_scene(const std::filesystem::path& dir, const std::vector<Frame>& frames,
                 const GroundTruth& truth) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& frame : frames)
        write_pnm_frame(dir / frame_filename(frame.index, frame.is_color()), frame);
    write_pbm(dir / "truth_mask.pbm", truth.width, truth.height, truth.mask);
    nlohmann::ordered_json j;
    j["corpus_id"] = truth.corpus_id;
    j["transcript"] = truth.transcript;
    j["rect"] = {{"x", truth.rect.x}, {"y", truth.rect.y}, {"w", truth.rect.w}, {"h", truth.rect.h}};
    j["frames"] = truth.frame_count;
    j["width"] = truth.width;
    j["height"] = truth.height;
    j["mask_file"] = "truth_mask.pbm";
    std::ofstream out(dir / "truth.json");
    if (!out) throw FormatError("cannot write truth.json");
    out << j.dump(2) << "\n";
}

GroundTruth read_truth(const std::filesystem::path& dir) {
    std::ifstream in(dir / "truth.json");
    if (!in) throw FormatError("cannot open truth.json in " + dir.string());
    nlohmann::json j;
    in >> j;
    GroundTruth truth;
    truth.corpus_id = j.value("corpus_id", "");
    truth.transcript = j.at("transcript").get<std::string>();
    truth.rect = Rect{j.at("rect").at("x"), j.at("rect").at("y"), j.at("rect").at("w"),
                      j.at("rect").at("h")};
    truth.frame_count = j.at("frames").get<int>();
    truth.width = j.at("width").get<int>();
    truth.height = j.at("height").get<int>();
    int w = 0, h = 0;
    truth.mask = read_pbm(dir / j.value("mask_file", "truth_mask.pbm"), w, h);
    if (w != truth.width || h != truth.height) throw FormatError("mask dimensions disagree with truth.json");
    return truth;
}

}  // namespace vocr
