#pragma once
// Chord diagrams of laminations (SVG) and Julia set rasters (PNG).
#include "lamlab/dynamics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lamlab {

struct ChordOptions {
    int size = 600;
    double stroke = 1.0;
    bool hull = false;  // fill each class as its hyperbolic polygon instead of drawing all pairs
    // color classes by the number of tau_3 steps to the generator class
    std::optional<AngleSet> generator;
};

// circle plus one hyperbolic geodesic per pair of angles in each class
std::string chord_svg(const Lamination& lam, const ChordOptions& opt = {});

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

struct Overlay {
    std::vector<cplx> points;
    Rgb color{255, 0, 0};
    std::vector<cplx> markers;  // e.g. turning points
};

struct JuliaPlot {
    CubicParam a;
    int width = 512, height = 512;
    cplx center{0, 0};
    double span = 3.0;  // width of the view in the plane
    int budget = 200;
    int period = 0;  // shade the basin of c when > 0
    std::string palette = "classic";  // classic | gray
    std::vector<Overlay> overlays;
};

struct Image {
    int width = 0, height = 0;
    std::vector<Rgb> pixels;          // row-major, top row first
    std::vector<std::uint8_t> escaped;  // 1 where green_external > 0
    Rgb at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
    // pixel centre in the plane
    static cplx plane(const JuliaPlot& p, double x, double y);
};

constexpr int max_raster_side = 8192;

Image julia_raster(const JuliaPlot& plot);
std::vector<std::uint8_t> encode_png(const Image& img);
void write_png(const Image& img, const std::string& path);

}
