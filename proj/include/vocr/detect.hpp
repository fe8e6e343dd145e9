#pragma once

#include <vector>

#include "vocr/raster.hpp"

namespace vocr {

// Sobel gradient magnitude map. Range [0, 255*4*sqrt(2)] ~ [0, 1443].
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<float> magnitude;

    float at(int x, int y) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
};

struct DetectParams {
    double edge_thresh = 100.0;    // Sobel magnitude counted as an edge pixel
    int window = 21;               // density window (odd, >= 3)
    double density_thresh = 0.20;  // fraction of edge pixels marking a text pixel
    int min_w = 16;                // minimum region size
    int min_h = 8;
    bool color_check = false;      // uniform-color verification pass
    double color_tol = 48.0;       // RGB euclidean tolerance around the dominant color
    bool red_channel = false;      // detect on the red component instead of luma

    void validate() const;
};

struct TextRegion {
    Rect rect;
    int frame_index = 0;
    double score = 0.0;  // mean window edge density over the region's marked pixels
};

// 3x3 Sobel magnitude with edge-replication padding. Image must be >= 3x3.
EdgeMap edge_map(const GrayImage& img);

// Fraction of above-threshold edge pixels in the window around each pixel
// (window clipped at borders, normalized by the clipped area).
FloatImage edge_density(const EdgeMap& em, const DetectParams& params);

// Threshold the edge map, mark pixels whose window density clears the
// density threshold, take 8-connected components of the marked pixels, and
// return bounding rects meeting the minimum size, sorted by descending
// score then ascending (y, x).
std::vector<TextRegion> detect_regions(const EdgeMap& em, const DetectParams& params,
                                       int frame_index = 0);

// Uniform-color verification: quantize edge-adjacent pixels in the region
// to 16 levels per channel, take the dominant bin, and accept when >= 30%
// of them lie within `color_tol` of that bin's mean color. Always true when
// the check is disabled.
bool color_verify(const Frame& frame, const TextRegion& region, const DetectParams& params);

// Full per-frame detection: edge_map + detect_regions + color_verify.
std::vector<TextRegion> detect_frame(const Frame& frame, const DetectParams& params);

}  // namespace vocr
