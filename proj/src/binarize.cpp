#include "vocr/binarize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "vocr/glyphs.hpp"
#include "vocr/otsu.hpp"
#include "vocr/synth.hpp"

namespace vocr {

int otsu_threshold(const std::vector<std::uint8_t>& values) {
    long hist[256] = {0};
    for (auto v : values) ++hist[v];
    const double total = static_cast<double>(values.size());
    double sum_all = 0;
    for (int v = 0; v < 256; ++v) sum_all += static_cast<double>(v) * hist[v];

    double best = -1.0;
    int best_t = 0;
    double w0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += static_cast<double>(t) * hist[t];
        const double w1 = total - w0;
        if (w0 <= 0 || w1 <= 0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {  // strict: ties keep the lowest threshold
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

std::string to_string(StrokeDirection dir) {
    switch (dir) {
        case StrokeDirection::horizontal: return "horizontal";
        case StrokeDirection::vertical: return "vertical";
        case StrokeDirection::left_diagonal: return "left-diagonal";
        case StrokeDirection::right_diagonal: return "right-diagonal";
    }
    return "?";
}

StrokeDirection stroke_direction_from_string(const std::string& name) {
    for (auto dir : kStrokeDirections)
        if (to_string(dir) == name) return dir;
    throw FormatError("unknown stroke direction: " + name);
}

StrokeFilter::StrokeFilter(StrokeDirection dir, int k_, std::vector<double> kern, double thresh)
    : direction(dir), k(k_), kernel(std::move(kern)), threshold(thresh) {
    if (k < 1 || k % 2 == 0) throw UsageError("kernel size must be odd and positive");
    if (kernel.size() != static_cast<std::size_t>(k) * k)
        throw UsageError("kernel has wrong size");
    if (threshold <= 0.0 || threshold > 1.0) throw UsageError("filter threshold must lie in (0,1]");
    double mean = 0;
    for (double v : kernel) mean += v;
    mean /= static_cast<double>(kernel.size());
    for (double& v : kernel) v -= mean;
    if (norm() <= 0.0) throw UsageError("kernel must not be constant");
}

double StrokeFilter::norm() const {
    double n = 0;
    for (double v : kernel) n += v * v;
    return std::sqrt(n);
}

const StrokeFilter& StrokeFilterBank::filter(StrokeDirection dir) const {
    return filters[static_cast<std::size_t>(dir)];
}
StrokeFilter& StrokeFilterBank::filter(StrokeDirection dir) {
    return filters[static_cast<std::size_t>(dir)];
}

std::string StrokeFilterBank::serialize() const {
    std::ostringstream out;
    out.precision(17);
    out << "SFBANK k=" << k << "\n";
    for (auto dir : kStrokeDirections) {
        const StrokeFilter& f = filter(dir);
        out << "DIR " << to_string(dir) << " THRESH " << f.threshold << "\n";
        for (int y = 0; y < k; ++y) {
            for (int x = 0; x < k; ++x) {
                if (x) out << " ";
                out << f.kernel[static_cast<std::size_t>(y) * k + x];
            }
            out << "\n";
        }
    }
    return out.str();
}

void StrokeFilterBank::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write filter bank: " + path.string());
    out << serialize();
}

StrokeFilterBank StrokeFilterBank::parse(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    in >> tag;
    if (tag != "SFBANK") throw FormatError("filter bank must start with SFBANK");
    std::string kfield;
    in >> kfield;
    if (kfield.rfind("k=", 0) != 0) throw FormatError("expected k=<k> after SFBANK");
    const int k = std::stoi(kfield.substr(2));
    if (k < 1 || k % 2 == 0) throw FormatError("bank kernel size must be odd and positive");

    StrokeFilterBank bank;
    bank.k = k;
    std::vector<bool> seen(4, false);
    for (int block = 0; block < 4; ++block) {
        std::string kw, name, threshkw;
        double thresh = 0;
        if (!(in >> kw >> name >> threshkw >> thresh) || kw != "DIR" || threshkw != "THRESH")
            throw FormatError("expected 'DIR <name> THRESH <t>' block");
        const StrokeDirection dir = stroke_direction_from_string(name);
        if (seen[static_cast<std::size_t>(dir)]) throw FormatError("duplicate direction in bank");
        seen[static_cast<std::size_t>(dir)] = true;
        std::vector<double> kernel(static_cast<std::size_t>(k) * k);
        for (auto& v : kernel)
            if (!(in >> v)) throw FormatError("truncated kernel in filter bank");
        bank.filter(dir) = StrokeFilter(dir, k, std::move(kernel), thresh);
    }
    return bank;
}

StrokeFilterBank StrokeFilterBank::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open filter bank: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

StrokeFilterBank train_filters(const std::vector<MarkedSample>& samples, int k,
                               TrainReport* report) {
    if (k < 1 || k % 2 == 0) throw UsageError("kernel size must be odd and positive");
    std::array<std::vector<double>, 4> sums;
    std::array<long, 4> counts{0, 0, 0, 0};
    for (auto& s : sums) s.assign(static_cast<std::size_t>(k) * k, 0.0);
    TrainReport local;

    for (const auto& sample : samples) {
        if (sample.patch.width < k || sample.patch.height < k) {
            ++local.rejected;  // undersized patch, skipped with a warning in the report
            continue;
        }
        const int cx = (sample.patch.width - 1) / 2;
        const int cy = (sample.patch.height - 1) / 2;
        const int r = k / 2;
        auto& sum = sums[static_cast<std::size_t>(sample.direction)];
        for (int y = 0; y < k; ++y)
            for (int x = 0; x < k; ++x)
                sum[static_cast<std::size_t>(y) * k + x] +=
                    sample.patch.at_clamped(cx - r + x, cy - r + y);
        ++counts[static_cast<std::size_t>(sample.direction)];
        ++local.used;
    }
    if (report) *report = local;

    StrokeFilterBank bank;
    bank.k = k;
    for (auto dir : kStrokeDirections) {
        const auto d = static_cast<std::size_t>(dir);
        if (counts[d] == 0)
            throw TrainError("no usable training sample for direction " + to_string(dir));
        std::vector<double> kernel(sums[d].size());
        for (std::size_t i = 0; i < kernel.size(); ++i)
            kernel[i] = sums[d][i] / static_cast<double>(counts[d]);
        // StrokeFilter's constructor performs the mean subtraction.
        bank.filter(dir) = StrokeFilter(dir, k, std::move(kernel), 0.5);
    }
    return bank;
}

namespace {

// Renders a glyph onto a padded bright canvas, the regime the pipeline's
// enhanced images live in (dark strokes on light background).
GrayImage glyph_canvas(char c, const GlyphSet& glyphs, int pad, std::uint8_t fg, std::uint8_t bg) {
    const auto& bm = glyphs.bitmap(c);
    const int cw = glyphs.cell_width(), ch = glyphs.cell_height();
    GrayImage canvas(cw + 2 * pad, ch + 2 * pad, bg);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
            if (bm[static_cast<std::size_t>(y) * cw + x]) canvas.at(pad + x, pad + y) = fg;
    return canvas;
}

bool ink(const GlyphSet& glyphs, char c, int x, int y) {
    const int cw = glyphs.cell_width(), ch = glyphs.cell_height();
    if (x < 0 || y < 0 || x >= cw || y >= ch) return false;
    return glyphs.bitmap(c)[static_cast<std::size_t>(y) * cw + x] != 0;
}

}  // namespace

std::vector<MarkedSample> default_training_samples() {
    const GlyphSet& glyphs = GlyphSet::builtin();
    const int pad = 4;
    const std::uint8_t fg = 0, bg = 200;
    const std::string chars = "BEHLNTXZK027";  // covers stems, bars and both diagonals

    std::vector<MarkedSample> samples;
    for (char c : chars) {
        const GrayImage canvas = glyph_canvas(c, glyphs, pad, fg, bg);
        const int cw = glyphs.cell_width(), ch = glyphs.cell_height();
        for (int y = 0; y < ch; ++y)
            for (int x = 0; x < cw; ++x) {
                if (!ink(glyphs, c, x, y)) continue;
                const bool n = ink(glyphs, c, x, y - 1), s = ink(glyphs, c, x, y + 1);
                const bool w = ink(glyphs, c, x - 1, y), e = ink(glyphs, c, x + 1, y);
                const bool nw = ink(glyphs, c, x - 1, y - 1), se = ink(glyphs, c, x + 1, y + 1);
                const bool ne = ink(glyphs, c, x + 1, y - 1), sw = ink(glyphs, c, x - 1, y + 1);
                // Classification tolerates 2px-thick strokes (a parallel
                // neighbor may be inked); junction pixels match nothing.
                StrokeDirection dir;
                if (nw && se && !ne && !sw) {
                    dir = StrokeDirection::left_diagonal;
                } else if (ne && sw && !nw && !se) {
                    dir = StrokeDirection::right_diagonal;
                } else if (n && s && !(w && e)) {
                    dir = StrokeDirection::vertical;
                } else if (w && e && !(n && s)) {
                    dir = StrokeDirection::horizontal;
                } else {
                    continue;
                }
                // Patch centered on the stroke pixel; canvas pad keeps the
                // 2r+1 window inside. Both the crisp render and a blurred
                // variant contribute, so the kernels fire on enhanced
                // images from degraded sequences too.
                const int r = 5;
                const Rect window{pad + x - r, pad + y - r, 2 * r + 1, 2 * r + 1};
                if (window.x < 0 || window.y < 0 || window.right() > canvas.width ||
                    window.bottom() > canvas.height)
                    continue;
                samples.push_back({crop_gray(canvas, window), dir});
                samples.push_back({crop_gray(degrade(canvas, 0.0, 1, 0), window), dir});
            }
    }
    return samples;
}

StrokeFilterBank train_default_bank(int k) {
    StrokeFilterBank bank = train_filters(default_training_samples(), k);
    // Shipped thresholds, calibrated once on the glyph corpus: 0.40 keeps
    // the seed within one dilation step of every stroke pixel while bg
    // seeding stays under 3%.
    for (auto& f : bank.filters) f.threshold = 0.40;
    return bank;
}

// Normalization makes faint background texture correlate as strongly as a
// real stroke, so windows whose gray range stays under this floor are
// treated as flat and score 0 (the score would otherwise be pure noise).
constexpr int kMinWindowRange = 32;

FloatImage correlate(const GrayImage& img, const StrokeFilter& f) {
    const int k = f.k;
    if (img.width < k || img.height < k)
        throw UsageError("image smaller than the correlation kernel");
    const double kern_norm = f.norm();
    const int r = k / 2;
    FloatImage out(img.width, img.height);
    std::vector<double> window(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double mean = 0;
            double lo = 255, hi = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const double v = img.at_clamped(x + dx, y + dy);
                    window[static_cast<std::size_t>(dy + r) * k + (dx + r)] = v;
                    mean += v;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            if (hi - lo < kMinWindowRange) {
                out.at(x, y) = 0.f;
                continue;
            }
            mean /= static_cast<double>(k * k);
            double dot = 0, wnorm2 = 0;
            for (std::size_t i = 0; i < window.size(); ++i) {
                const double d = window[i] - mean;
                dot += d * f.kernel[i];
                wnorm2 += d * d;
            }
            float score = 0.f;
            if (wnorm2 > 0)
                score = static_cast<float>(dot / (std::sqrt(wnorm2) * kern_norm));
            out.at(x, y) = std::clamp(score, -1.f, 1.f);
        }
    return out;
}

long BinaryTextImage::popcount() const {
    long n = 0;
    for (auto b : bits) n += b;
    return n;
}

BinaryTextImage threshold_union(const std::array<FloatImage, 4>& maps,
                                const StrokeFilterBank& bank) {
    const int w = maps[0].width, h = maps[0].height;
    for (const auto& m : maps)
        if (m.width != w || m.height != h)
            throw UsageError("correlation maps have mismatched dimensions");
    BinaryTextImage out;
    out.width = w;
    out.height = h;
    out.provenance = BinaryTextImage::Provenance::correlation;
    out.bits.assign(static_cast<std::size_t>(w) * h, 0);
    for (std::size_t d = 0; d < 4; ++d) {
        const double thresh = bank.filters[d].threshold;
        for (std::size_t i = 0; i < out.bits.size(); ++i)
            if (maps[d].values[i] > thresh) out.bits[i] = 1;
    }
    return out;
}

BinaryTextImage global_binarize(const GrayImage& img, Polarity polarity) {
    if (img.values.empty()) throw UsageError("global_binarize on an empty image");
    BinaryTextImage out;
    out.width = img.width;
    out.height = img.height;
    out.polarity = polarity;
    out.provenance = BinaryTextImage::Provenance::global;
    out.bits.assign(img.values.size(), 0);
    const auto [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
    if (*lo == *hi) return out;  // constant image: empty foreground
    const int t = otsu_threshold(img.values);
    for (std::size_t i = 0; i < img.values.size(); ++i) {
        const bool dark = img.values[i] <= t;
        out.bits[i] = (polarity == Polarity::dark ? dark : !dark) ? 1 : 0;
    }
    return out;
}

std::vector<std::uint8_t> dilate3x3(const std::vector<std::uint8_t>& bits, int width, int height,
                                    int iterations) {
    std::vector<std::uint8_t> cur = bits;
    std::vector<std::uint8_t> next(bits.size());
    for (int it = 0; it < iterations; ++it) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                std::uint8_t v = 0;
                for (int dy = -1; dy <= 1 && !v; ++dy)
                    for (int dx = -1; dx <= 1 && !v; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
                        v = cur[static_cast<std::size_t>(ny) * width + nx];
                    }
                next[static_cast<std::size_t>(y) * width + x] = v;
            }
        std::swap(cur, next);
    }
    return cur;
}

BinaryTextImage correlation_binarize(const GrayImage& img, const StrokeFilterBank& bank) {
    std::array<FloatImage, 4> maps;
    for (std::size_t d = 0; d < 4; ++d) maps[d] = correlate(img, bank.filters[d]);
    return threshold_union(maps, bank);
}

BinaryTextImage hybrid_binarize(const EnhancedImage& enh, const StrokeFilterBank& bank,
                                const HybridParams& params) {
    BinaryTextImage seed = correlation_binarize(enh.gray, bank);
    if (seed.popcount() == 0) {
        BinaryTextImage out = global_binarize(enh.gray, Polarity::dark);
        out.provenance = BinaryTextImage::Provenance::hybrid;
        out.degraded = true;
        return out;
    }

    const int w = enh.width(), h = enh.height();
    auto color_at = [&](std::size_t i, int c) -> std::uint8_t {
        return enh.has_color ? enh.color[i * 3 + c] : enh.gray.values[i];
    };

    // Text color estimate: per-channel median over seed pixels.
    std::uint8_t text_color[3];
    for (int c = 0; c < 3; ++c) {
        std::vector<std::uint8_t> vals;
        vals.reserve(static_cast<std::size_t>(seed.popcount()));
        for (std::size_t i = 0; i < seed.bits.size(); ++i)
            if (seed.bits[i]) vals.push_back(color_at(i, c));
        const std::size_t mid = (vals.size() - 1) / 2;
        std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
        text_color[c] = vals[mid];
    }

    const std::vector<std::uint8_t> support = dilate3x3(seed.bits, w, h, params.dilate_radius);
    BinaryTextImage out;
    out.width = w;
    out.height = h;
    out.provenance = BinaryTextImage::Provenance::hybrid;
    out.bits.assign(seed.bits.size(), 0);
    const double d2max = params.color_dist * params.color_dist;
    for (std::size_t i = 0; i < out.bits.size(); ++i) {
        if (!support[i]) continue;
        double d2 = 0;
        for (int c = 0; c < 3; ++c) {
            const double d = static_cast<double>(color_at(i, c)) - text_color[c];
            d2 += d * d;
        }
        if (d2 <= d2max) out.bits[i] = 1;
    }
    return out;
}

}  // namespace vocr
