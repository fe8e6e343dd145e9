#include "vocr/recognize.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vocr {

void OcrAdapterSpec::validate() const {
    const auto first = command_template.find("{in}");
    if (first == std::string::npos || command_template.find("{in}", first + 1) != std::string::npos)
        throw UsageError("adapter command template must contain {in} exactly once");
    if (timeout_seconds <= 0) throw UsageError("adapter timeout must be positive");
}

std::vector<Rect> segment_glyphs(const BinaryTextImage& img) {
    std::vector<Rect> boxes;
    if (img.width == 0 || img.height == 0) return boxes;

    std::vector<int> column_count(img.width, 0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            column_count[x] += img.bits[static_cast<std::size_t>(y) * img.width + x];

    int run_start = -1;
    for (int x = 0; x <= img.width; ++x) {
        const bool inked = x < img.width && column_count[x] > 0;
        if (inked && run_start < 0) run_start = x;
        if (!inked && run_start >= 0) {
            // Tighten vertically over the run.
            int top = img.height, bottom = -1;
            for (int y = 0; y < img.height; ++y)
                for (int cx = run_start; cx < x; ++cx)
                    if (img.bits[static_cast<std::size_t>(y) * img.width + cx]) {
                        top = std::min(top, y);
                        bottom = std::max(bottom, y);
                    }
            boxes.push_back({run_start, top, x - run_start, bottom - top + 1});
            run_start = -1;
        }
    }
    return boxes;
}

namespace {

// Tight-crop `bits` to its ink and rescale to cell size by nearest
// neighbor. All-empty input yields an all-empty cell.
std::vector<std::uint8_t> normalize_to_cell(const std::vector<std::uint8_t>& bits, int w, int h,
                                            int cell_w, int cell_h) {
    int minx = w, maxx = -1, miny = h, maxy = -1;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (bits[static_cast<std::size_t>(y) * w + x]) {
                minx = std::min(minx, x);
                maxx = std::max(maxx, x);
                miny = std::min(miny, y);
                maxy = std::max(maxy, y);
            }
    std::vector<std::uint8_t> cell(static_cast<std::size_t>(cell_w) * cell_h, 0);
    if (maxx < 0) return cell;
    const int tw = maxx - minx + 1, th = maxy - miny + 1;
    for (int y = 0; y < cell_h; ++y)
        for (int x = 0; x < cell_w; ++x) {
            const int sx = minx + std::min(tw - 1, static_cast<int>((x + 0.5) * tw / cell_w));
            const int sy = miny + std::min(th - 1, static_cast<int>((y + 0.5) * th / cell_h));
            cell[static_cast<std::size_t>(y) * cell_w + x] =
                bits[static_cast<std::size_t>(sy) * w + sx];
        }
    return cell;
}

}  // namespace

std::pair<char, double> match_glyph(const BinaryTextImage& img, const Rect& box,
                                    const GlyphSet& glyphs) {
    check_rect_in(box, img.width, img.height);
    std::vector<std::uint8_t> box_bits(static_cast<std::size_t>(box.w) * box.h);
    for (int y = 0; y < box.h; ++y)
        for (int x = 0; x < box.w; ++x)
            box_bits[static_cast<std::size_t>(y) * box.w + x] =
                img.bits[static_cast<std::size_t>(box.y + y) * img.width + box.x + x];

    const int cw = glyphs.cell_width(), ch = glyphs.cell_height();
    const std::vector<std::uint8_t> probe = normalize_to_cell(box_bits, box.w, box.h, cw, ch);
    const double cell_area = static_cast<double>(cw) * ch;

    char best_char = 0;
    double best_conf = -1.0;
    for (char c : glyphs.charset()) {
        const auto& bm = glyphs.bitmap(c);
        const bool blank = std::all_of(bm.begin(), bm.end(), [](std::uint8_t b) { return !b; });
        if (blank) continue;  // space never competes against ink
        const std::vector<std::uint8_t> tmpl = normalize_to_cell(bm, cw, ch, cw, ch);
        long agree = 0;
        for (std::size_t i = 0; i < tmpl.size(); ++i)
            if ((tmpl[i] != 0) == (probe[i] != 0)) ++agree;
        const double conf = agree / cell_area;
        if (conf > best_conf) {  // strict: ties keep charset order
            best_conf = conf;
            best_char = c;
        }
    }
    return {best_char, best_conf};
}

namespace {

Recognition run_adapter(const BinaryTextImage& img, const OcrAdapterSpec& adapter) {
    adapter.validate();
    namespace fs = std::filesystem;
    // Unique-ish scratch names; adapters run concurrently across tracks.
    static std::atomic<unsigned> counter{0};
    const unsigned token = counter++;
    const fs::path in_path =
        fs::temp_directory_path() / ("vocr_ocr_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(token) + ".pbm");
    const fs::path out_path = in_path.string() + ".out";
    const fs::path err_path = in_path.string() + ".err";
    write_pbm(in_path, img.width, img.height, img.bits);

    std::string cmd = adapter.command_template;
    cmd.replace(cmd.find("{in}"), 4, in_path.string());
    std::ostringstream full;
    full << "timeout " << adapter.timeout_seconds << "s " << cmd << " > " << out_path.string()
         << " 2> " << err_path.string();
    const int status = std::system(full.str().c_str());

    std::string text, err;
    {
        std::ifstream out(out_path);
        std::ostringstream buf;
        buf << out.rdbuf();
        text = buf.str();
        std::ifstream errf(err_path);
        std::ostringstream ebuf;
        ebuf << errf.rdbuf();
        err = ebuf.str();
    }
    std::error_code ec;
    fs::remove(in_path, ec);
    fs::remove(out_path, ec);
    fs::remove(err_path, ec);

    if (status != 0)
        throw EngineError("OCR adapter failed (status " + std::to_string(status) + "): " + err);

    // Trim trailing/leading whitespace from stdout.
    const auto begin = text.find_first_not_of(" \t\r\n");
    const auto end = text.find_last_not_of(" \t\r\n");
    text = begin == std::string::npos ? "" : text.substr(begin, end - begin + 1);

    Recognition rec;
    rec.engine = Recognition::Engine::external;
    rec.text = text;
    rec.confidences.assign(text.size(), 0.5);
    return rec;
}

}  // namespace

Recognition recognize_track(const BinaryTextImage& img, const GlyphSet& glyphs,
                            const std::optional<OcrAdapterSpec>& adapter) {
    if (adapter) return run_adapter(img, *adapter);

    Recognition rec;
    rec.engine = Recognition::Engine::builtin;
    const std::vector<Rect> boxes = segment_glyphs(img);
    if (boxes.empty()) return rec;

    std::vector<int> gaps;
    for (std::size_t i = 1; i < boxes.size(); ++i)
        gaps.push_back(boxes[i].x - boxes[i - 1].right());
    std::vector<int> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    const double median_gap = sorted.empty() ? 0.0 : sorted[(sorted.size() - 1) / 2];

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (i > 0 && !gaps.empty() && gaps[i - 1] > 1.5 * median_gap) {
            rec.text.push_back(' ');
            rec.confidences.push_back(1.0);
        }
        const auto [c, conf] = match_glyph(img, boxes[i], glyphs);
        rec.text.push_back(c);
        rec.confidences.push_back(conf);
    }
    return rec;
}

}  // namespace vocr
