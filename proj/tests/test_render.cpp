#include <doctest.h>
#include "lamlab/error.hpp"
#include "lamlab/render.hpp"

#include <zlib.h>

#include <cmath>
#include <regex>

using namespace lamlab;

namespace {

Angle A(long long n, long long d) { return Angle(n, d); }

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return std::uint32_t(b[at]) << 24 | std::uint32_t(b[at + 1]) << 16 | std::uint32_t(b[at + 2]) << 8 | b[at + 3];
}

}

TEST_CASE("chord diagram structure") {
    auto empty = chord_svg(Lamination(3));
    CHECK(count(empty, "<circle") == 1);
    CHECK(count(empty, "<path") == 0);

    auto one = chord_svg(Lamination(3, {AngleSet{A(1, 12), A(5, 12)}}));
    CHECK(count(one, "class=\"chord\"") == 1);
    CHECK(count(one, " A ") == 1);

    // a diameter is a straight segment
    auto dia = chord_svg(Lamination(3, {AngleSet{A(0, 1), A(1, 2)}}));
    CHECK(count(dia, " L ") == 1);
    CHECK(count(dia, " A ") == 0);

    // one path per pair of angles in each class
    Lamination lam(3, {AngleSet{A(1, 9), A(4, 9), A(7, 9)}, AngleSet{A(1, 3), A(2, 3)}});
    CHECK(count(chord_svg(lam), "class=\"chord\"") == lam.pair_count());
    ChordOptions hull;
    hull.hull = true;
    auto h = chord_svg(lam, hull);
    CHECK(count(h, "class=\"hull\"") == 1);
    CHECK(count(h, "class=\"chord\"") == 1);
    CHECK(chord_svg(lam) == chord_svg(lam));
}

TEST_CASE("chord arcs bend towards the centre") {
    // the arc from 0 to 1/4 (size 600, R = 290): endpoints (590,300) and (300,10); its centre
    // is the corner (590,10) outside the disk at distance R tan(pi/4)
    auto svg = chord_svg(Lamination(3, {AngleSet{A(0, 1), A(1, 4)}}));
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("M ([-0-9.]+) ([-0-9.]+) A ([-0-9.]+) [-0-9.]+ 0 0 ([01]) ([-0-9.]+) ([-0-9.]+)")));
    CHECK(std::stod(m[1]) == doctest::Approx(590));
    CHECK(std::stod(m[2]) == doctest::Approx(300));
    CHECK(std::stod(m[3]) == doctest::Approx(290));
    CHECK(std::stod(m[5]) == doctest::Approx(300));
    CHECK(std::stod(m[6]) == doctest::Approx(10));
    // seen from (590,10) the start lies at screen angle 90 deg and the end at 180 deg; the short
    // arc through 135 deg, towards the disk centre, has increasing angle: sweep 1
    CHECK(m[4] == "1");
}

TEST_CASE("z^3 raster is the unit disk") {
    JuliaPlot p;
    p.a = CubicParam{};
    p.width = p.height = 512;
    auto img = julia_raster(p);
    const double px = p.span / p.width;
    int wrong = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            double r = std::abs(Image::plane(p, x, y));
            bool esc = img.escaped[std::size_t(y) * img.width + x];
            if (std::abs(r - 1) > px && esc != (r > 1)) ++wrong;
        }
    CHECK(wrong == 0);
}

TEST_CASE("raster is stable when the budget doubles") {
    JuliaPlot p;
    p.a = CubicParam{{0.3, 0}, {0.3, 0}};
    p.width = p.height = 256;
    p.budget = 100;
    auto a = julia_raster(p);
    p.budget = 200;
    auto b = julia_raster(p);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.escaped.size(); ++i) changed += a.escaped[i] != b.escaped[i];
    CHECK(double(changed) / double(a.escaped.size()) < 0.005);
    CHECK(julia_raster(p).pixels == b.pixels);
}

TEST_CASE("overlays are drawn in plane coordinates") {
    JuliaPlot p;
    p.width = p.height = 101;
    p.span = 4;
    Overlay ov;
    ov.points = {cplx(1, 0), cplx(2, 0)};
    ov.color = {255, 0, 0};
    ov.markers = {cplx(0, 0)};
    p.overlays = {ov};
    auto img = julia_raster(p);
    int red = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.at(x, y) == Rgb{255, 0, 0}) {
                ++red;
                CHECK(Image::plane(p, x, y).imag() == doctest::Approx(0).epsilon(p.span / p.width));
                CHECK(Image::plane(p, x, y).real() >= 1 - p.span / p.width);
            }
    CHECK(red >= 25);
    CHECK(img.at(50, 50) == Rgb{255, 255, 0});
}

TEST_CASE("PNG encoding round trip") {
    JuliaPlot p;
    p.width = 37;
    p.height = 23;
    auto img = julia_raster(p);
    auto png = encode_png(img);
    const std::vector<std::uint8_t> sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    REQUIRE(png.size() > 33);
    CHECK(std::vector<std::uint8_t>(png.begin(), png.begin() + 8) == sig);
    CHECK(std::string(png.begin() + 12, png.begin() + 16) == "IHDR");
    CHECK(be32(png, 16) == 37);
    CHECK(be32(png, 20) == 23);
    CHECK(png[24] == 8);
    CHECK(png[25] == 2);
    // walk the chunks, check every CRC and inflate the image data
    std::size_t at = 8;
    std::vector<std::uint8_t> idat;
    std::string last;
    while (at + 12 <= png.size()) {
        std::uint32_t len = be32(png, at);
        std::string type(png.begin() + at + 4, png.begin() + at + 8);
        std::uint32_t crc = std::uint32_t(crc32(0L, png.data() + at + 4, uInt(len + 4)));
        CHECK(be32(png, at + 8 + len) == crc);
        if (type == "IDAT") idat.insert(idat.end(), png.begin() + at + 8, png.begin() + at + 8 + len);
        last = type;
        at += 12 + len;
    }
    CHECK(at == png.size());
    CHECK(last == "IEND");
    std::vector<std::uint8_t> raw(std::size_t(23) * (3 * 37 + 1));
    uLongf n = uLongf(raw.size());
    REQUIRE(uncompress(raw.data(), &n, idat.data(), uLong(idat.size())) == Z_OK);
    REQUIRE(n == raw.size());
    for (int y = 0; y < 23; ++y) {
        CHECK(raw[std::size_t(y) * 112] == 0);
        for (int x = 0; x < 37; ++x) {
            const std::uint8_t* q = &raw[std::size_t(y) * 112 + 1 + 3 * x];
            CHECK((Rgb{q[0], q[1], q[2]} == img.at(x, y)));
        }
    }
}

TEST_CASE("raster preconditions") {
    JuliaPlot p;
    p.width = 0;
    CHECK_THROWS_AS(julia_raster(p), Error);
    p.width = max_raster_side + 1;
    CHECK_THROWS_AS(julia_raster(p), Error);
    p.width = 16;
    p.budget = 0;
    CHECK_THROWS_AS(julia_raster(p), Error);
}
