#include "lamlab/render.hpp"
#include "lamlab/error.hpp"

#include <tbb/parallel_for.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lamlab {

cplx Image::plane(const JuliaPlot& p, double x, double y) {
    const double px = p.span / p.width;
    return p.center + cplx((x + 0.5 - p.width / 2.0) * px, (p.height / 2.0 - y - 0.5) * px);
}

namespace {

Rgb escape_color(double g, const std::string& palette) {
    // smooth in log g: bands of the potential
    double s = 0.5 + 0.5 * std::cos(1.3 * std::log(g));
    if (palette == "gray") {
        auto v = std::uint8_t(80 + 175 * s);
        return {v, v, v};
    }
    return {std::uint8_t(30 + 60 * s), std::uint8_t(60 + 120 * s), std::uint8_t(150 + 105 * s)};
}

void plot_dot(Image& img, int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.pixels[std::size_t(y) * img.width + x] = c;
}

void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb c) {
    double n = std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)));
    if (!(n < 1e5)) return;  // far outside the view
    for (int i = 0; i <= int(n); ++i) {
        double t = n > 0 ? i / n : 0;
        plot_dot(img, int(std::floor(x0 + t * (x1 - x0))), int(std::floor(y0 + t * (y1 - y0))), c);
    }
}

}

Image julia_raster(const JuliaPlot& plot) {
    if (plot.width < 1 || plot.height < 1 || plot.width > max_raster_side || plot.height > max_raster_side)
        throw precondition("raster size out of range");
    if (plot.budget < 1) throw precondition("escape budget must be >= 1");
    Image img;
    img.width = plot.width;
    img.height = plot.height;
    img.pixels.assign(std::size_t(plot.width) * plot.height, Rgb{});
    img.escaped.assign(img.pixels.size(), 0);
    tbb::parallel_for(0, plot.height, [&](int y) {
        for (int x = 0; x < plot.width; ++x) {
            cplx z = Image::plane(plot, x, y);
            double g = green_external(plot.a, z, plot.budget);
            std::size_t i = std::size_t(y) * plot.width + x;
            if (g > 0) {
                img.escaped[i] = 1;
                img.pixels[i] = escape_color(g, plot.palette);
            } else if (plot.period > 0) {
                double s = exp_green_internal(plot.a, plot.period, z, plot.budget);
                if (s < 1) {
                    auto v = std::uint8_t(200 * (1 - s) + 40);
                    img.pixels[i] = plot.palette == "gray" ? Rgb{v, v, v} : Rgb{v, std::uint8_t(v / 2), 20};
                }
            }
        }
    });
    // overlays in plane coordinates
    const double px = plot.span / plot.width;
    auto to_px = [&](cplx z) {
        return std::pair<double, double>{(z.real() - plot.center.real()) / px + plot.width / 2.0,
                                         plot.height / 2.0 - (z.imag() - plot.center.imag()) / px};
    };
    for (const auto& ov : plot.overlays) {
        for (std::size_t k = 1; k < ov.points.size(); ++k) {
            auto [x0, y0] = to_px(ov.points[k - 1]);
            auto [x1, y1] = to_px(ov.points[k]);
            draw_line(img, x0, y0, x1, y1, ov.color);
        }
        for (cplx m : ov.markers) {
            auto [mx, my] = to_px(m);
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) plot_dot(img, int(std::floor(mx)) + dx, int(std::floor(my)) + dy, Rgb{255, 255, 0});
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    std::vector<std::uint8_t> raw;
    raw.reserve(std::size_t(img.height) * (3 * img.width + 1));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // no filter
        for (int x = 0; x < img.width; ++x) {
            Rgb c = img.at(x, y);
            raw.insert(raw.end(), {c.r, c.g, c.b});
        }
    }
    uLongf zlen = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> z(zlen);
    if (compress2(z.data(), &zlen, raw.data(), uLong(raw.size()), 9) != Z_OK) throw numerical("zlib compression failed");
    z.resize(zlen);

    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    auto be32 = [&](std::vector<std::uint8_t>& v, std::uint32_t x) {
        v.insert(v.end(), {std::uint8_t(x >> 24), std::uint8_t(x >> 16), std::uint8_t(x >> 8), std::uint8_t(x)});
    };
    auto chunk = [&](const char* type, const std::vector<std::uint8_t>& data) {
        be32(out, std::uint32_t(data.size()));
        std::vector<std::uint8_t> body(type, type + 4);
        body.insert(body.end(), data.begin(), data.end());
        out.insert(out.end(), body.begin(), body.end());
        be32(out, std::uint32_t(crc32(0L, body.data(), uInt(body.size()))));
    };
    std::vector<std::uint8_t> ihdr;
    be32(ihdr, std::uint32_t(img.width));
    be32(ihdr, std::uint32_t(img.height));
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit RGB
    chunk("IHDR", ihdr);
    chunk("IDAT", z);
    chunk("IEND", {});
    return out;
}

void write_png(const Image& img, const std::string& path) {
    auto bytes = encode_png(img);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw precondition("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

}
