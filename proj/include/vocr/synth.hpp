#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vocr/glyphs.hpp"
#include "vocr/raster.hpp"

namespace vocr {

// Deterministic random source: mt19937 with Box-Muller gaussians. The raw
// 32-bit stream is pinned by the C++ standard, so identical seeds give
// identical sequences on every platform. Cross-language ports can only be
// expected to match statistically.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}

    std::uint32_t next_u32() { return engine_(); }
    // Uniform in [0, 1), derived directly from the raw stream.
    double next_unit() { return (static_cast<double>(next_u32()) + 0.5) / 4294967296.0; }
    int next_int(int lo, int hi);  // inclusive range
    double next_gauss();

private:
    std::mt19937 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class BackgroundMode { solid, hscroll, blocks };

struct SceneSpec {
    std::string text;
    Rect rect;                 // caption box; rendered text is centered inside
    std::uint8_t fg = 0;       // caption gray (or gray level replicated to RGB)
    BackgroundMode background = BackgroundMode::blocks;
    int frame_count = 1;
    double noise_sigma = 0.0;
    int blur_radius = 0;       // number of 3x3 box blur passes
    std::uint64_t seed = 0;

    int width = 160;           // frame dimensions
    int height = 120;
    std::uint8_t bg_lo = 210;  // background gray range
    std::uint8_t bg_hi = 245;
    int bg_step = 1;           // block palette granularity (1 = continuous)
    int block_size = 16;       // blocks mode tile edge
    bool color = false;        // emit RGB frames (blocks get random hues)
};

struct GroundTruth {
    std::string transcript;
    Rect rect;                              // caption rect (static, same every frame)
    int frame_count = 0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;         // frame-sized, 1 = text pixel, identical across frames
    std::string corpus_id;                  // ties run outputs back to this corpus
};

// Box blur (`radius` passes of a 3x3 mean with edge replication) followed
// by clamped additive gaussian noise. Deterministic in `seed`.
GrayImage degrade(const GrayImage& img, double noise_sigma, int blur_radius, std::uint64_t seed);

// Generate the frame sequence plus pixel-exact ground truth. The caption is
// composited identically in every frame; the background evolves per mode;
// degradation happens after compositing, so the mask reflects clean text.
std::pair<std::vector<Frame>, GroundTruth> synth_sequence(const SceneSpec& spec,
                                                          const GlyphSet& glyphs);

// Compute a caption rect centered in the frame for `text` with `pad` pixels
// of margin around the rendered glyph block.
Rect centered_caption_rect(const SceneSpec& spec, const GlyphSet& glyphs, int pad = 3);

std::string corpus_id_for(const SceneSpec& spec);

// Write frames + truth.json + truth_mask.pbm into `dir` (created if absent).
void write_scene(const std::filesystem::path& dir, const std::vector<Frame>& frames,
                 const GroundTruth& truth);
GroundTruth read_truth(const std::filesystem::path& dir);

}  // namespace vocr
