#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "vocr/enhance.hpp"
#include "vocr/raster.hpp"

namespace vocr {

enum class StrokeDirection { horizontal, vertical, left_diagonal, right_diagonal };
constexpr std::array<StrokeDirection, 4> kStrokeDirections = {
    StrokeDirection::horizontal, StrokeDirection::vertical, StrokeDirection::left_diagonal,
    StrokeDirection::right_diagonal};

std::string to_string(StrokeDirection dir);
StrokeDirection stroke_direction_from_string(const std::string& name);

// One trained correlation kernel. Kernels are zero-mean by construction
// (enforced here) and applied via normalized cross-correlation, so their
// thresholds live in (0, 1].
struct StrokeFilter {
    StrokeDirection direction = StrokeDirection::horizontal;
    int k = 5;
    std::vector<double> kernel;  // k*k, row-major, zero-mean
    double threshold = 0.5;

    StrokeFilter() = default;
    StrokeFilter(StrokeDirection dir, int k, std::vector<double> kernel, double threshold);
    double norm() const;
};

struct StrokeFilterBank {
    int k = 5;
    std::array<StrokeFilter, 4> filters;  // indexed in kStrokeDirections order

    const StrokeFilter& filter(StrokeDirection dir) const;
    StrokeFilter& filter(StrokeDirection dir);

    void save(const std::filesystem::path& path) const;
    static StrokeFilterBank load(const std::filesystem::path& path);
    std::string serialize() const;
    static StrokeFilterBank parse(const std::string& text);
};

// A gray patch whose center pixel sits on a stroke of the labelled
// direction; training averages the k x k windows around these centers.
struct MarkedSample {
    GrayImage patch;
    StrokeDirection direction = StrokeDirection::horizontal;
};

struct TrainReport {
    int used = 0;
    int rejected = 0;  // patches smaller than k
};

// Per direction: mean of the k x k windows centered on the sample patch
// centers, mean-subtracted. Thresholds initialize to 0.5. Undersized
// patches are skipped; a direction left with no usable sample throws
// TrainError.
StrokeFilterBank train_filters(const std::vector<MarkedSample>& samples, int k,
                               TrainReport* report = nullptr);

// The shipped bank: trained on strokes of the builtin glyph set rendered
// over a plain background (also stored at assets/default_bank.sfb).
StrokeFilterBank train_default_bank(int k = 5);

// Builds the MarkedSamples train_default_bank uses; exposed for the
// train-filters CLI subcommand.
std::vector<MarkedSample> default_training_samples();

// Zero-mean normalized cross-correlation of `img` with the filter kernel at
// every pixel, borders edge-replicated. Output range [-1, 1]. Windows with
// zero variance score 0, as do windows whose gray range falls below 1/4 of
// full scale (see kMinWindowRange): normalization would otherwise let faint
// background texture correlate as strongly as an actual stroke.
FloatImage correlate(const GrayImage& img, const StrokeFilter& f);

struct BinaryTextImage {
    enum class Provenance { correlation, global, hybrid };

    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 1 = text
    Polarity polarity = Polarity::dark;
    Provenance provenance = Provenance::correlation;
    bool degraded = false;  // hybrid fell back to the global threshold

    long popcount() const;
};

// Union of the four thresholded correlation maps: a pixel is text when any
// map exceeds its filter's threshold there.
BinaryTextImage threshold_union(const std::array<FloatImage, 4>& maps,
                                const StrokeFilterBank& bank);

// Otsu global threshold; the text side follows the polarity flag. Constant
// images yield an empty foreground.
BinaryTextImage global_binarize(const GrayImage& img, Polarity polarity);

struct HybridParams {
    double color_dist = 110.0; // RGB euclidean distance to the text color estimate
    int dilate_radius = 1;     // 3x3 dilation iterations applied to the seed mask
};

// Correlation seed -> text color estimate (per-channel median over seed
// pixels) -> keep pixels that are both color-consistent and inside the
// dilated seed. Falls back to global_binarize (degraded flag set) when the
// seed is empty. Uses the enhanced image's color plane when present, else
// gray replicated to RGB.
BinaryTextImage hybrid_binarize(const EnhancedImage& enh, const StrokeFilterBank& bank,
                                const HybridParams& params = {});

// Correlation-only binarization of an enhanced image (the paper's base
// technique): correlate all four filters and union.
BinaryTextImage correlation_binarize(const GrayImage& img, const StrokeFilterBank& bank);

std::vector<std::uint8_t> dilate3x3(const std::vector<std::uint8_t>& bits, int width, int height,
                                    int iterations);

}  // namespace vocr
