#include <doctest.h>

#include <fstream>
#include <sstream>

#include "vocr/glyphs.hpp"

using namespace vocr;

TEST_CASE("builtin glyph set shape") {
    const GlyphSet& g = GlyphSet::builtin();
    CHECK(g.cell_width() == 7);
    CHECK(g.cell_height() == 11);
    CHECK(g.charset() == "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ");
}

TEST_CASE("builtin glyphs keep the layout contract") {
    // Every non-space glyph: empty side columns 0 and 6, ink in every
    // column 1..5, ink in rows 0 and 10 (tight box = 5x11). These are what
    // segmentation and template normalization rely on.
    const GlyphSet& g = GlyphSet::builtin();
    for (char c : g.charset()) {
        if (c == ' ') continue;
        CAPTURE(c);
        const auto& bm = g.bitmap(c);
        auto ink = [&](int x, int y) { return bm[static_cast<std::size_t>(y) * 7 + x] != 0; };
        for (int y = 0; y < 11; ++y) {
            CHECK(!ink(0, y));
            CHECK(!ink(6, y));
        }
        for (int x = 1; x <= 5; ++x) {
            bool any = false;
            for (int y = 0; y < 11; ++y) any = any || ink(x, y);
            CHECK(any);
        }
        bool top = false, bottom = false;
        for (int x = 0; x < 7; ++x) {
            top = top || ink(x, 0);
            bottom = bottom || ink(x, 10);
        }
        CHECK(top);
        CHECK(bottom);
    }
}

TEST_CASE("builtin glyphs are pairwise distinct") {
    const GlyphSet& g = GlyphSet::builtin();
    int min_dist = 77;
    std::pair<char, char> worst{0, 0};
    const std::string& cs = g.charset();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i] == ' ') continue;
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            if (cs[j] == ' ') continue;
            const auto& a = g.bitmap(cs[i]);
            const auto& b = g.bitmap(cs[j]);
            int d = 0;
            for (std::size_t k = 0; k < a.size(); ++k) d += a[k] != b[k];
            if (d < min_dist) {
                min_dist = d;
                worst = {cs[i], cs[j]};
            }
        }
    }
    CAPTURE(worst.first);
    CAPTURE(worst.second);
    CHECK(min_dist >= 4);
}

TEST_CASE("asset file matches the embedded set") {
    GlyphSet from_file = GlyphSet::load(std::string(VOCR_ASSET_DIR) + "/glyphs7x11.txt");
    CHECK(from_file.serialize() == GlyphSet::builtin().serialize());
}

TEST_CASE("render_caption layout") {
    const GlyphSet& g = GlyphSet::builtin();

    SUBCASE("empty text gives an empty raster") {
        auto [img, mask] = render_caption("", g, 0);
        CHECK(img.width == 0);
        CHECK(mask.empty());
    }
    SUBCASE("single glyph equals its bitmap at fg") {
        auto [img, mask] = render_caption("A", g, 200);
        const auto& bm = g.bitmap('A');
        REQUIRE(img.width == 7);
        REQUIRE(img.height == 11);
        for (std::size_t i = 0; i < bm.size(); ++i) {
            CHECK(mask[i] == bm[i]);
            CHECK(img.values[i] == (bm[i] ? 200 : 0));
        }
    }
    SUBCASE("two glyphs take 2*cell + 1 columns") {
        auto [img, mask] = render_caption("AB", g, 0);
        CHECK(img.width == 2 * 7 + 1);
        CHECK(caption_width("AB", g) == 15);
    }
    SUBCASE("unsupported character") {
        CHECK_THROWS_AS(render_caption("a?", g, 0), FormatError);
    }
}

TEST_CASE("glyph set parser rejects malformed input") {
    CHECK_THROWS_AS(GlyphSet::parse("NOPE 7 11\n"), FormatError);
    CHECK_THROWS_AS(GlyphSet::parse("GLYPHSET 2 1\nCHAR A\n#.#\n"), FormatError);  // wrong width
    CHECK_THROWS_AS(GlyphSet::parse("GLYPHSET 2 1\nCHAR A\n#.\nCHAR A\n.#\n"), FormatError);
    const GlyphSet ok = GlyphSet::parse("GLYPHSET 2 1\nCHAR A\n#.\nCHAR SPACE\n..\n");
    CHECK(ok.charset() == "A ");
    CHECK(ok.bitmap(' ') == std::vector<std::uint8_t>{0, 0});
}
