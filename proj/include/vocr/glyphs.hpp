#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vocr/raster.hpp"

namespace vocr {

// Fixed-cell monospace glyph bitmaps. Used by the synthetic corpus
// generator to render captions and by the builtin recognizer as templates.
class GlyphSet {
public:
    GlyphSet(int cell_w, int cell_h, std::string charset,
             std::map<char, std::vector<std::uint8_t>> bitmaps);

    // The 7x11 A-Z 0-9 + space set shipped with the library (also checked
    // into assets/glyphs7x11.txt).
    static const GlyphSet& builtin();

    // Text-art format: "GLYPHSET <w> <h>" then per glyph "CHAR <c>" (or
    // "CHAR SPACE") followed by <h> rows of '#'/'.' of width <w>.
    static GlyphSet parse(const std::string& text);
    static GlyphSet load(const std::filesystem::path& path);
    std::string serialize() const;

    int cell_width() const { return cell_w_; }
    int cell_height() const { return cell_h_; }
    const std::string& charset() const { return charset_; }
    bool has(char c) const { return bitmaps_.count(c) != 0; }
    // One byte per cell pixel, 1 = ink.
    const std::vector<std::uint8_t>& bitmap(char c) const;

private:
    int cell_w_;
    int cell_h_;
    std::string charset_;
    std::map<char, std::vector<std::uint8_t>> bitmaps_;
};

// Lay glyphs out left to right with a 1-pixel gap between cells. Returns
// the caption as a gray image (glyph pixels = fg, rest 0) plus the exact
// foreground mask (1 byte per pixel, 1 = text). Empty text gives a 0x0
// image. Characters outside the charset throw FormatError.
std::pair<GrayImage, std::vector<std::uint8_t>> render_caption(const std::string& text,
                                                               const GlyphSet& glyphs,
                                                               std::uint8_t fg);

// Width in pixels render_caption will produce for `text`.
int caption_width(const std::string& text, const GlyphSet& glyphs);

}  // namespace vocr
