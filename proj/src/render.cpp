#include "lamlab/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lamlab {

namespace {

const char* kColors[] = {"#c0392b", "#2471a3", "#229954", "#b9770e", "#7d3c98", "#17a589", "#a04000", "#5d6d7e"};

struct Pt {
    double x, y;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

// geodesic from angle a to angle b as an SVG path segment (without the initial move)
std::string geodesic(const Angle& a, const Angle& b, double cx, double cy, double R) {
    const double tb = 2 * M_PI * b.to_double();
    Pt Q{cx + R * std::cos(tb), cy - R * std::sin(tb)};
    Rational len = interval_length(a, b);
    if (len == Rational(1, 2)) return "L " + fmt(Q.x) + " " + fmt(Q.y);
    double d = static_cast<double>(len);
    double half = M_PI * std::min(d, 1 - d);  // half the central angle
    double rho = R * std::tan(half);
    // when b follows a by less than half a turn the arc turns clockwise about its centre in the
    // plane, which with y pointing down is the positive-angle sweep
    int sweep = d < 0.5 ? 1 : 0;
    return "A " + fmt(rho) + " " + fmt(rho) + " 0 0 " + std::to_string(sweep) + " " + fmt(Q.x) + " " + fmt(Q.y);
}

Pt point(const Angle& a, double cx, double cy, double R) {
    const double t = 2 * M_PI * a.to_double();
    return {cx + R * std::cos(t), cy - R * std::sin(t)};
}

int generator_distance(const AngleSet& e, const AngleSet& gen, int d) {
    AngleSet cur = e;
    for (int n = 0; n <= 64; ++n) {
        if (cur == gen) return n;
        cur = tau_image(d, cur);
    }
    return -1;
}

}

std::string chord_svg(const Lamination& lam, const ChordOptions& opt) {
    const double S = opt.size, cx = S / 2, cy = S / 2, R = S / 2 - 10;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.size << "\" height=\"" << opt.size
        << "\" viewBox=\"0 0 " << opt.size << " " << opt.size << "\">\n";
    out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(R)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << fmt(opt.stroke) << "\"/>\n";
    for (const auto& cls : lam.classes()) {
        std::string color = kColors[0];
        if (opt.generator) {
            int n = generator_distance(cls, *opt.generator, lam.degree());
            color = n < 0 ? "#808080" : kColors[n % 8];
        }
        const auto& m = cls.members();
        if (opt.hull && m.size() > 2) {
            Pt p0 = point(m[0], cx, cy, R);
            out << "<path class=\"hull\" d=\"M " << fmt(p0.x) << " " << fmt(p0.y);
            for (std::size_t i = 0; i < m.size(); ++i) out << " " << geodesic(m[i], m[(i + 1) % m.size()], cx, cy, R);
            out << " Z\" fill=\"" << color << "\" fill-opacity=\"0.4\" stroke=\"" << color << "\" stroke-width=\""
                << fmt(opt.stroke) << "\"/>\n";
            continue;
        }
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); ++j) {
                Pt p = point(m[i], cx, cy, R);
                out << "<path class=\"chord\" d=\"M " << fmt(p.x) << " " << fmt(p.y) << " " << geodesic(m[i], m[j], cx, cy, R)
                    << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt(opt.stroke) << "\"/>\n";
            }
    }
    out << "</svg>\n";
    return out.str();
}

}
