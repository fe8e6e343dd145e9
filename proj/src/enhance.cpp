#include "vocr/enhance.hpp"

#include <algorithm>
#include <cmath>

#include "vocr/otsu.hpp"

namespace vocr {

FusionStat fusion_stat_from_string(const std::string& name) {
    if (name == "min") return FusionStat::minimum;
    if (name == "mean") return FusionStat::mean;
    if (name == "median") return FusionStat::median;
    if (name == "max") return FusionStat::maximum;
    throw UsageError("unknown fusion statistic: " + name);
}

std::string to_string(FusionStat stat) {
    switch (stat) {
        case FusionStat::minimum: return "min";
        case FusionStat::mean: return "mean";
        case FusionStat::median: return "median";
        case FusionStat::maximum: return "max";
    }
    return "?";
}

namespace {

const Frame* frame_with_index(const std::vector<Frame>& frames, int index) {
    for (const auto& f : frames)
        if (f.index == index) return &f;
    return nullptr;
}

// Lower median keeps the output an actual sample.
template <typename T>
T lower_median(std::vector<T>& v) {
    const std::size_t k = (v.size() - 1) / 2;
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

}  // namespace

EnhancedImage fuse(const std::vector<Frame>& frames, const TextTrack& track, FusionStat stat) {
    if (track.instances.empty()) throw UsageError("fuse on an empty track");
    const Rect ref = track.instances.front().rect;

    std::vector<const Frame*> inst_frames;
    inst_frames.reserve(track.instances.size());
    bool any_color = false;
    for (const auto& inst : track.instances) {
        const Frame* f = frame_with_index(frames, inst.frame_index);
        if (!f) throw UsageError("instance frame missing from sequence");
        any_color = any_color || f->is_color();
        inst_frames.push_back(f);
    }

    EnhancedImage out;
    out.gray = GrayImage(ref.w, ref.h);
    out.samples.assign(static_cast<std::size_t>(ref.w) * ref.h, 0);
    out.has_color = any_color;
    if (any_color) out.color.assign(static_cast<std::size_t>(ref.w) * ref.h * 3, 0);

    std::vector<std::uint8_t> gray_samples;
    std::vector<std::uint8_t> chan[3];
    for (int py = 0; py < ref.h; ++py)
        for (int px = 0; px < ref.w; ++px) {
            gray_samples.clear();
            for (auto& c : chan) c.clear();
            int chosen_instance = -1;  // argmin/argmax holder for min/max
            std::uint8_t chosen_rgb[3] = {0, 0, 0};
            int extreme = stat == FusionStat::maximum ? -1 : 256;

            for (std::size_t i = 0; i < track.instances.size(); ++i) {
                const TrackInstance& inst = track.instances[i];
                const Frame* f = inst_frames[i];
                const int x = inst.rect.x + inst.dx + px;
                const int y = inst.rect.y + inst.dy + py;
                if (x < 0 || y < 0 || x >= f->width || y >= f->height) continue;
                const std::uint8_t g = f->gray_at(x, y);
                gray_samples.push_back(g);
                std::uint8_t rgb[3];
                f->rgb_at(x, y, rgb);
                for (int c = 0; c < 3; ++c) chan[c].push_back(rgb[c]);
                const bool better = stat == FusionStat::maximum ? g > extreme : g < extreme;
                if (better) {  // strict comparison keeps the earliest frame on ties
                    extreme = g;
                    chosen_instance = static_cast<int>(i);
                    std::copy(rgb, rgb + 3, chosen_rgb);
                }
            }
            if (gray_samples.empty())
                throw UsageError("track instance with zero valid samples at a pixel");

            const std::size_t idx = static_cast<std::size_t>(py) * ref.w + px;
            out.samples[idx] = static_cast<std::uint16_t>(gray_samples.size());

            std::uint8_t value = 0;
            std::uint8_t rgb_out[3] = {0, 0, 0};
            switch (stat) {
                case FusionStat::minimum:
                case FusionStat::maximum:
                    value = static_cast<std::uint8_t>(extreme);
                    std::copy(chosen_rgb, chosen_rgb + 3, rgb_out);
                    (void)chosen_instance;
                    break;
                case FusionStat::mean: {
                    long sum = 0;
                    for (auto g : gray_samples) sum += g;
                    value = static_cast<std::uint8_t>(
                        std::lround(static_cast<double>(sum) / gray_samples.size()));
                    for (int c = 0; c < 3; ++c) {
                        long s = 0;
                        for (auto v : chan[c]) s += v;
                        rgb_out[c] = static_cast<std::uint8_t>(
                            std::lround(static_cast<double>(s) / chan[c].size()));
                    }
                    break;
                }
                case FusionStat::median: {
                    std::vector<std::uint8_t> tmp = gray_samples;
                    value = lower_median(tmp);
                    for (int c = 0; c < 3; ++c) {
                        tmp = chan[c];
                        rgb_out[c] = lower_median(tmp);
                    }
                    break;
                }
            }
            out.gray.values[idx] = value;
            if (any_color)
                for (int c = 0; c < 3; ++c) out.color[idx * 3 + c] = rgb_out[c];
        }
    return out;
}

PolarityChoice choose_polarity(const EnhancedImage& enh_min, const EnhancedImage& enh_max) {
    if (enh_min.width() != enh_max.width() || enh_min.height() != enh_max.height())
        throw UsageError("polarity fusions have mismatched dimensions");

    // Foreground fraction of the extreme-valued side under an Otsu split;
    // degenerate (constant) images count as fraction 0.
    auto extreme_fraction = [](const GrayImage& img, bool dark_side, bool& degenerate) {
        const auto [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
        if (*lo == *hi) {
            degenerate = true;
            return 0.0;
        }
        const int t = otsu_threshold(img.values);
        long fg = 0;
        for (auto v : img.values)
            if (dark_side ? v <= t : v > t) ++fg;
        return static_cast<double>(fg) / static_cast<double>(img.values.size());
    };

    bool degen_min = false, degen_max = false;
    const double frac_min = extreme_fraction(enh_min.gray, true, degen_min);
    const double frac_max = extreme_fraction(enh_max.gray, false, degen_max);

    constexpr double kExpectedCoverage = 0.15;
    PolarityChoice choice;
    choice.degenerate = degen_min && degen_max;
    if (std::abs(frac_min - kExpectedCoverage) <= std::abs(frac_max - kExpectedCoverage)) {
        choice.image = enh_min;
        choice.polarity = Polarity::dark;
    } else {
        choice.image = enh_max;
        choice.polarity = Polarity::light;
    }
    return choice;
}

}  // namespace vocr
