#include "vocr/glyphs.hpp"

#include <fstream>
#include <sstream>

namespace vocr {

namespace {
const char* kBuiltinGlyphs =
#include "glyphs_builtin.inc"
    ;
}  // namespace

GlyphSet::GlyphSet(int cell_w, int cell_h, std::string charset,
                   std::map<char, std::vector<std::uint8_t>> bitmaps)
    : cell_w_(cell_w), cell_h_(cell_h), charset_(std::move(charset)), bitmaps_(std::move(bitmaps)) {
    if (cell_w_ < 1 || cell_h_ < 1) throw FormatError("glyph cell dimensions must be positive");
    for (std::size_t i = 0; i < charset_.size(); ++i) {
        if (charset_.find(charset_[i], i + 1) != std::string::npos)
            throw FormatError("duplicate character in charset");
        auto it = bitmaps_.find(charset_[i]);
        if (it == bitmaps_.end()) throw FormatError("charset character without bitmap");
        if (it->second.size() != static_cast<std::size_t>(cell_w_) * cell_h_)
            throw FormatError("glyph bitmap has wrong size");
    }
}

const GlyphSet& GlyphSet::builtin() {
    static const GlyphSet set = GlyphSet::parse(kBuiltinGlyphs);
    return set;
}

GlyphSet GlyphSet::parse(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    int w = 0, h = 0;
    if (!(in >> tag >> w >> h) || tag != "GLYPHSET")
        throw FormatError("glyph set must start with 'GLYPHSET <w> <h>'");
    std::string charset;
    std::map<char, std::vector<std::uint8_t>> bitmaps;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream head(line);
        std::string kw, name;
        head >> kw >> name;
        if (kw != "CHAR" || name.empty()) throw FormatError("expected 'CHAR <c>' line");
        const char c = name == "SPACE" ? ' ' : name[0];
        if (name != "SPACE" && name.size() != 1) throw FormatError("glyph name must be one character");
        std::vector<std::uint8_t> bitmap;
        bitmap.reserve(static_cast<std::size_t>(w) * h);
        for (int row = 0; row < h; ++row) {
            if (!std::getline(in, line)) throw FormatError("truncated glyph bitmap");
            if (static_cast<int>(line.size()) != w) throw FormatError("glyph row has wrong width");
            for (char px : line) {
                if (px != '#' && px != '.') throw FormatError("glyph rows use only '#' and '.'");
                bitmap.push_back(px == '#' ? 1 : 0);
            }
        }
        if (bitmaps.count(c)) throw FormatError("duplicate glyph");
        bitmaps[c] = std::move(bitmap);
        charset.push_back(c);
    }
    if (charset.empty()) throw FormatError("glyph set has no glyphs");
    return GlyphSet(w, h, std::move(charset), std::move(bitmaps));
}

GlyphSet GlyphSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open glyph set: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string GlyphSet::serialize() const {
    std::ostringstream out;
    out << "GLYPHSET " << cell_w_ << " " << cell_h_ << "\n";
    for (char c : charset_) {
        out << "CHAR " << (c == ' ' ? std::string("SPACE") : std::string(1, c)) << "\n";
        const auto& bm = bitmaps_.at(c);
        for (int y = 0; y < cell_h_; ++y) {
            for (int x = 0; x < cell_w_; ++x)
                out << (bm[static_cast<std::size_t>(y) * cell_w_ + x] ? '#' : '.');
            out << "\n";
        }
    }
    return out.str();
}

const std::vector<std::uint8_t>& GlyphSet::bitmap(char c) const {
    auto it = bitmaps_.find(c);
    if (it == bitmaps_.end())
        throw FormatError(std::string("character not in charset: '") + c + "'");
    return it->second;
}

int caption_width(const std::string& text, const GlyphSet& glyphs) {
    if (text.empty()) return 0;
    const int n = static_cast<int>(text.size());
    return n * glyphs.cell_width() + (n - 1);
}

std::pair<GrayImage, std::vector<std::uint8_t>> render_caption(const std::string& text,
                                                               const GlyphSet& glyphs,
                                                               std::uint8_t fg) {
    for (char c : text) {
        if (!glyphs.has(c))
            throw FormatError(std::string("character not in charset: '") + c + "'");
    }
    const int w = caption_width(text, glyphs);
    const int h = text.empty() ? 0 : glyphs.cell_height();
    GrayImage img(w, h);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    const int cw = glyphs.cell_width();
    for (int i = 0; i < static_cast<int>(text.size()); ++i) {
        const auto& bm = glyphs.bitmap(text[i]);
        const int x0 = i * (cw + 1);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < cw; ++x)
                if (bm[static_cast<std::size_t>(y) * cw + x]) {
                    img.at(x0 + x, y) = fg;
                    mask[static_cast<std::size_t>(y) * w + x0 + x] = 1;
                }
    }
    return {std::move(img), std::move(mask)};
}

}  // namespace vocr
