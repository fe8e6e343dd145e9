#pragma once

#include <optional>
#include <vector>

#include "vocr/raster.hpp"
#include "vocr/track.hpp"

namespace vocr {

enum class FusionStat { minimum, mean, median, maximum };
enum class Polarity { dark, light };

FusionStat fusion_stat_from_string(const std::string& name);
std::string to_string(FusionStat stat);

// Per-pixel order-statistic fusion of a track's aligned instances.
struct EnhancedImage {
    GrayImage gray;                       // reference-rect dimensions
    std::vector<std::uint8_t> color;      // RGB interleaved, present iff source frames were color
    std::vector<std::uint16_t> samples;   // valid sample count per pixel (>= 1)
    bool has_color = false;

    int width() const { return gray.width; }
    int height() const { return gray.height; }
};

// Gather, for each reference-rect pixel, the gray samples of every instance
// shifted by its offset, and reduce them with `stat`. The color output pairs
// each pixel with the color of the sample that attained the statistic
// (argmin/argmax instance for min/max, earliest frame on ties) or the
// per-channel mean/median for mean/median. Out-of-bounds samples are
// excluded per pixel; the reference instance always contributes, so every
// pixel keeps at least one sample.
EnhancedImage fuse(const std::vector<Frame>& frames, const TextTrack& track, FusionStat stat);

struct PolarityChoice {
    EnhancedImage image;
    Polarity polarity = Polarity::dark;
    bool degenerate = false;  // constant inputs, chosen by tie-break
};

// Pick between the min fusion (dark-text hypothesis) and max fusion
// (light-text hypothesis): Otsu-threshold each, measure the extreme-side
// foreground fraction, and keep the one nearer 0.15 (expected stroke
// coverage). Ties select the minimum fusion.
PolarityChoice choose_polarity(const EnhancedImage& enh_min, const EnhancedImage& enh_max);

}  // namespace vocr
