#include "vocr/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>

namespace vocr {

void DetectParams::validate() const {
    if (window < 3 || window % 2 == 0) throw UsageError("density window must be odd and >= 3");
    if (density_thresh < 0.0 || density_thresh > 1.0)
        throw UsageError("density threshold must lie in [0,1]");
    if (edge_thresh < 0.0) throw UsageError("edge threshold must be nonnegative");
    if (min_w < 1 || min_h < 1) throw UsageError("minimum region size must be positive");
    if (color_tol < 0.0) throw UsageError("color tolerance must be nonnegative");
}

EdgeMap edge_map(const GrayImage& img) {
    if (img.width < 3 || img.height < 3) throw UsageError("edge_map needs at least a 3x3 image");
    EdgeMap em;
    em.width = img.width;
    em.height = img.height;
    em.magnitude.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int p00 = img.at_clamped(x - 1, y - 1), p10 = img.at_clamped(x, y - 1),
                      p20 = img.at_clamped(x + 1, y - 1);
            const int p01 = img.at_clamped(x - 1, y), p21 = img.at_clamped(x + 1, y);
            const int p02 = img.at_clamped(x - 1, y + 1), p12 = img.at_clamped(x, y + 1),
                      p22 = img.at_clamped(x + 1, y + 1);
            const int gx = (p20 + 2 * p21 + p22) - (p00 + 2 * p01 + p02);
            const int gy = (p02 + 2 * p12 + p22) - (p00 + 2 * p10 + p20);
            em.magnitude[static_cast<std::size_t>(y) * img.width + x] =
                std::sqrt(static_cast<float>(gx) * gx + static_cast<float>(gy) * gy);
        }
    return em;
}

FloatImage edge_density(const EdgeMap& em, const DetectParams& params) {
    params.validate();
    const int w = em.width, h = em.height;
    // Integral image of the edge indicator gives O(1) window counts.
    std::vector<int> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int edge = em.at(x, y) >= params.edge_thresh ? 1 : 0;
            integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                edge + integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] +
                integral[static_cast<std::size_t>(y + 1) * (w + 1) + x] -
                integral[static_cast<std::size_t>(y) * (w + 1) + x];
        }
    const int r = params.window / 2;
    FloatImage density(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
            const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
            const int count = integral[static_cast<std::size_t>(y1 + 1) * (w + 1) + x1 + 1] -
                              integral[static_cast<std::size_t>(y0) * (w + 1) + x1 + 1] -
                              integral[static_cast<std::size_t>(y1 + 1) * (w + 1) + x0] +
                              integral[static_cast<std::size_t>(y0) * (w + 1) + x0];
            const int area = (x1 - x0 + 1) * (y1 - y0 + 1);
            density.at(x, y) = static_cast<float>(count) / static_cast<float>(area);
        }
    return density;
}

std::vector<TextRegion> detect_regions(const EdgeMap& em, const DetectParams& params,
                                       int frame_index) {
    params.validate();
    const int w = em.width, h = em.height;
    const FloatImage density = edge_density(em, params);

    std::vector<std::uint8_t> marked(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t i = 0; i < marked.size(); ++i)
        marked[i] = density.values[i] >= params.density_thresh ? 1 : 0;

    // 8-connected components over the marked pixels, BFS with a label map.
    std::vector<int> label(marked.size(), -1);
    std::vector<TextRegion> regions;
    int next_label = 0;
    std::queue<std::pair<int, int>> frontier;
    for (int sy = 0; sy < h; ++sy)
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
            if (!marked[si] || label[si] >= 0) continue;
            int minx = sx, maxx = sx, miny = sy, maxy = sy;
            double density_sum = 0.0;
            long count = 0;
            label[si] = next_label;
            frontier.push({sx, sy});
            while (!frontier.empty()) {
                auto [x, y] = frontier.front();
                frontier.pop();
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
                density_sum += density.at(x, y);
                ++count;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (!marked[ni] || label[ni] >= 0) continue;
                        label[ni] = next_label;
                        frontier.push({nx, ny});
                    }
            }
            ++next_label;
            const Rect rect{minx, miny, maxx - minx + 1, maxy - miny + 1};
            if (rect.w >= params.min_w && rect.h >= params.min_h)
                regions.push_back({rect, frame_index, density_sum / static_cast<double>(count)});
        }

    std::sort(regions.begin(), regions.end(), [](const TextRegion& a, const TextRegion& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.rect.y != b.rect.y) return a.rect.y < b.rect.y;
        return a.rect.x < b.rect.x;
    });
    return regions;
}

bool color_verify(const Frame& frame, const TextRegion& region, const DetectParams& params) {
    params.validate();
    if (!params.color_check) return true;
    check_rect_in(region.rect, frame.width, frame.height);

    const GrayImage plane = params.red_channel ? red_channel(frame) : to_gray(frame);
    const EdgeMap em = edge_map(plane);

    // Edge-adjacent = pixel whose 8-neighborhood (self included) holds an
    // edge pixel. These are the pixels the text/background boundary runs
    // through, where a caption shows one dominant color.
    struct Px {
        std::uint8_t rgb[3];
    };
    std::vector<Px> pixels;
    const Rect& r = region.rect;
    for (int y = r.y; y < r.bottom(); ++y)
        for (int x = r.x; x < r.right(); ++x) {
            bool adjacent = false;
            for (int dy = -1; dy <= 1 && !adjacent; ++dy)
                for (int dx = -1; dx <= 1 && !adjacent; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= frame.width || ny >= frame.height) continue;
                    if (em.at(nx, ny) >= params.edge_thresh) adjacent = true;
                }
            if (!adjacent) continue;
            Px px;
            frame.rgb_at(x, y, px.rgb);
            pixels.push_back(px);
        }
    if (pixels.empty()) return false;

    // Dominant 16-level quantized bin; ties resolved by smallest bin key.
    std::map<int, std::pair<long, std::array<long, 3>>> bins;
    for (const auto& px : pixels) {
        const int key = (px.rgb[0] >> 4) << 8 | (px.rgb[1] >> 4) << 4 | (px.rgb[2] >> 4);
        auto& entry = bins[key];
        entry.first++;
        for (int c = 0; c < 3; ++c) entry.second[c] += px.rgb[c];
    }
    long best_count = 0;
    std::array<double, 3> repr{0, 0, 0};
    for (const auto& [key, entry] : bins)
        if (entry.first > best_count) {
            best_count = entry.first;
            for (int c = 0; c < 3; ++c)
                repr[c] = static_cast<double>(entry.second[c]) / entry.first;
        }

    long covered = 0;
    const double tol2 = params.color_tol * params.color_tol;
    for (const auto& px : pixels) {
        double d2 = 0;
        for (int c = 0; c < 3; ++c) {
            const double d = px.rgb[c] - repr[c];
            d2 += d * d;
        }
        if (d2 <= tol2) ++covered;
    }
    return covered >= 0.30 * static_cast<double>(pixels.size());
}

std::vector<TextRegion> detect_frame(const Frame& frame, const DetectParams& params) {
    const GrayImage plane = params.red_channel ? red_channel(frame) : to_gray(frame);
    const EdgeMap em = edge_map(plane);
    std::vector<TextRegion> regions = detect_regions(em, params, frame.index);
    if (!params.color_check) return regions;
    std::vector<TextRegion> kept;
    kept.reserve(regions.size());
    for (const auto& region : regions)
        if (color_verify(frame, region, params)) kept.push_back(region);
    return kept;
}

}  // namespace vocr
