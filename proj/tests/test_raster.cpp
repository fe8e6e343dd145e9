#include <doctest.h>

#include <filesystem>
#include <random>

#include "vocr/raster.hpp"

using namespace vocr;
namespace fs = std::filesystem;

namespace {

Frame color_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return Frame::make_color(0, 1, 1, r, g, b);
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("to_gray luma endpoints and weights") {
    CHECK(to_gray(color_pixel(0, 0, 0)).at(0, 0) == 0);
    CHECK(to_gray(color_pixel(255, 255, 255)).at(0, 0) == 255);
    // round(0.299 * 255) = round(76.245)
    CHECK(to_gray(color_pixel(255, 0, 0)).at(0, 0) == 76);
    CHECK(to_gray(color_pixel(0, 255, 0)).at(0, 0) == 150);
    CHECK(to_gray(color_pixel(0, 0, 255)).at(0, 0) == 29);
}

TEST_CASE("to_gray is the identity on gray frames") {
    std::mt19937 rng(7);
    Frame f = Frame::make_gray(3, 8, 5);
    for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
    const GrayImage g = to_gray(f);
    CHECK(g.values == f.pixels);
}

TEST_CASE("crop basics") {
    Frame f = Frame::make_gray(2, 4, 4);
    for (int i = 0; i < 16; ++i) f.pixels[i] = static_cast<std::uint8_t>(i);

    SUBCASE("full-frame crop is the identity") {
        const Frame c = crop(f, {0, 0, 4, 4});
        CHECK(c.pixels == f.pixels);
        CHECK(c.index == f.index);
    }
    SUBCASE("interior 2x2 block") {
        const Frame c = crop(f, {1, 1, 2, 2});
        CHECK(c.width == 2);
        CHECK(c.height == 2);
        CHECK(c.pixels == std::vector<std::uint8_t>{5, 6, 9, 10});
    }
    SUBCASE("out-of-bounds rect") {
        CHECK_THROWS_AS(crop(f, {1, 0, 4, 4}), BoundsError);
        CHECK_THROWS_AS(crop(f, {0, 0, 5, 4}), BoundsError);
    }
}

TEST_CASE("crop composes") {
    std::mt19937 rng(11);
    Frame f = Frame::make_color(0, 12, 9);
    for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
    const Rect a{2, 1, 8, 6};
    const Rect b{1, 2, 5, 3};
    const Frame two_step = crop(crop(f, a), b);
    const Frame one_step = crop(f, {a.x + b.x, a.y + b.y, b.w, b.h});
    CHECK(two_step.pixels == one_step.pixels);
}

TEST_CASE("to_gray commutes with crop") {
    std::mt19937 rng(13);
    Frame f = Frame::make_color(0, 10, 7);
    for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
    const Rect r{3, 2, 5, 4};
    const GrayImage a = to_gray(crop(f, r));
    const GrayImage b = crop_gray(to_gray(f), r);
    CHECK(a.values == b.values);
}

TEST_CASE("translate_sample") {
    // Horizontal gradient: value = 10 * x.
    GrayImage img(16, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 16; ++x) img.at(x, y) = static_cast<std::uint8_t>(10 * x);
    const Rect r{4, 1, 5, 2};

    SUBCASE("zero shift equals crop") {
        CHECK(translate_sample(img, 0, 0, r).values == crop_gray(img, r).values);
    }
    SUBCASE("unit shift adds the gradient step") {
        const GrayImage base = crop_gray(img, r);
        const GrayImage shifted = translate_sample(img, 1, 0, r);
        for (std::size_t i = 0; i < base.values.size(); ++i)
            CHECK(shifted.values[i] == base.values[i] + 10);
    }
    SUBCASE("shift past the border") {
        CHECK_THROWS_AS(translate_sample(img, 8, 0, r), BoundsError);
        CHECK_THROWS_AS(translate_sample(img, 0, -2, r), BoundsError);
    }
}

TEST_CASE("pnm round trips") {
    const fs::path dir = temp_dir("vocr_test_pnm");
    std::mt19937 rng(3);

    SUBCASE("pgm") {
        GrayImage img(13, 7);
        for (auto& v : img.values) v = static_cast<std::uint8_t>(rng());
        write_pgm(dir / "a.pgm", img);
        const GrayImage back = read_pgm(dir / "a.pgm");
        CHECK(back.width == img.width);
        CHECK(back.values == img.values);
    }
    SUBCASE("ppm frame") {
        Frame f = Frame::make_color(5, 6, 4);
        for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
        write_pnm_frame(dir / "b.ppm", f);
        const Frame back = read_pnm_frame(dir / "b.ppm", 5);
        CHECK(back.is_color());
        CHECK(back.pixels == f.pixels);
    }
    SUBCASE("pbm packs rows MSB-first") {
        // 9 wide forces a 2-byte row.
        std::vector<std::uint8_t> bits(9 * 2, 0);
        bits[0] = bits[8] = bits[9 + 3] = 1;
        write_pbm(dir / "c.pbm", 9, 2, bits);
        int w = 0, h = 0;
        CHECK(read_pbm(dir / "c.pbm", w, h) == bits);
        CHECK(w == 9);
        CHECK(h == 2);
    }
}

TEST_CASE("frame directory ordering follows the filename index") {
    const fs::path dir = temp_dir("vocr_test_framedir");
    for (int idx : {7, 0, 12}) {
        Frame f = Frame::make_gray(idx, 4, 3, static_cast<std::uint8_t>(idx));
        write_pnm_frame(dir / frame_filename(idx, false), f);
    }
    const auto frames = read_frame_dir(dir);
    REQUIRE(frames.size() == 3);
    CHECK(frames[0].index == 0);
    CHECK(frames[1].index == 7);
    CHECK(frames[2].index == 12);
    CHECK(frames[1].pixels[0] == 7);
}
