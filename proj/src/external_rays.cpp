#include "lamlab/dynamics.hpp"
#include "lamlab/error.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>

namespace lamlab {

std::string to_string(RayStatus s) {
    switch (s) {
        case RayStatus::Landed: return "landed";
        case RayStatus::Obstructed: return "obstructed";
        default: return "escaped-budget";
    }
}

namespace {

// the two other roots of f(z') = f(z)
std::pair<cplx, cplx> siblings(const CubicParam& a, cplx z) {
    cplx s = std::sqrt(12.0 * a.c * a.c - 3.0 * z * z);
    return {(-z + s) / 2.0, (-z - s) / 2.0};
}

// Newton for f^m(z) = target, damped; nullopt when it fails to converge
std::optional<cplx> solve_iterate(const CubicParam& a, int m, cplx target, cplx z) {
    cplx d;
    cplx w = iterate(a, z, m, &d);
    double res = std::abs(w - target);
    for (int it = 0; it < 80; ++it) {
        if (d == 0.0 || !std::isfinite(res)) return std::nullopt;
        cplx step = (w - target) / d;
        double lam = 1.0;
        cplx zn, wn, dn;
        for (;;) {
            zn = z - lam * step;
            wn = iterate(a, zn, m, &dn);
            if (std::isfinite(std::abs(wn)) && std::abs(wn - target) < res) break;
            lam *= 0.5;
            if (lam < 1e-8) break;
        }
        if (lam < 1e-8) {
            // no decrease: either converged to rounding or stuck
            return std::abs(step) < 1e-13 * (1 + std::abs(z)) ? std::optional<cplx>(z) : std::nullopt;
        }
        bool done = lam * std::abs(step) < 1e-15 * (1 + std::abs(z));
        z = zn;
        w = wn;
        d = dn;
        res = std::abs(w - target);
        if (done || res <= 1e-15 * std::abs(target)) return z;
    }
    return std::nullopt;
}

}

ExternalRay trace_external_ray(const CubicParam& a, const Angle& theta, const RayOptions& opt) {
    if (!(opt.target_potential > 0)) throw precondition("target potential must be positive");
    if (opt.steps_per_level < 1) throw precondition("steps per level must be >= 1");
    const double R = opt.escape_radius;
    if (std::max(std::abs(a.c), std::abs(a.b())) * 100 > R) throw precondition("escape radius too small for this parameter");
    ExternalRay ray;
    ray.theta = theta;
    const double G0 = std::log(R);
    const int levels = int(std::ceil(std::log(G0 / opt.target_potential) / std::log(3.0)));
    cplx z = bottcher_external_inverse(a, std::polar(R, 2 * M_PI * theta.to_double()));
    ray.points.push_back({G0, z});
    Angle ang = theta;
    const double ds0 = 1.0 / opt.steps_per_level;
    for (int lev = 0; lev < levels; ++lev) {
        const int m = lev + 1;
        ang = tau(3, ang);
        const double arg = 2 * M_PI * ang.to_double();
        double s = 0, ds = ds0;
        cplx tgt_end = 0;
        while (s < 1.0) {
            double st = std::min(1.0, s + ds);
            // f^m(z) sits at potential G0 * 3^(1 - st)
            cplx W = std::polar(std::exp(G0 * std::pow(3.0, 1.0 - st)), arg);
            cplx tgt = bottcher_external_inverse(a, W);
            auto zn = solve_iterate(a, m, tgt, z);
            bool ok = bool(zn);
            if (ok) {
                auto [s1, s2] = siblings(a, *zn);
                double sep = std::min(std::abs(*zn - s1), std::abs(*zn - s2));
                ok = std::abs(*zn - z) < 0.5 * sep;
            }
            if (ok) {
                z = *zn;
                s = st;
                tgt_end = tgt;
                ds = std::min(ds0, 2 * ds);
            } else {
                ds *= 0.5;
                if (ds < ds0 * 1e-6) {
                    // below the rounding floor the tail has already converged
                    std::size_t n = ray.points.size();
                    bool floor = n >= 3 && std::abs(ray.points[n - 1].z - ray.points[n - 2].z) <= 1e-13 * (1 + std::abs(z));
                    ray.status = floor ? RayStatus::EscapedBudget : RayStatus::Obstructed;
                    return ray;
                }
            }
        }
        // distance of f(z_{k+1}) from the exact point of the image ray, to first order
        cplx d;
        cplx w = iterate(a, z, m, &d);
        ray.max_residual = std::max(ray.max_residual, std::abs(w - tgt_end) * std::abs(derivative(a, z) / d));
        ray.points.push_back({G0 / std::pow(3.0, lev + 1), z});
    }
    ray.status = RayStatus::EscapedBudget;
    return ray;
}

ExternalRay trace_external_ray(const CubicParam& a, const Angle& theta, double target_potential,
                               int steps_per_level) {
    RayOptions o;
    o.target_potential = target_potential;
    o.steps_per_level = steps_per_level;
    return trace_external_ray(a, theta, o);
}

// Cauchy tail estimate with an Aitken correction
std::optional<cplx> detail::tail_limit(const std::vector<cplx>& zs, double tol, double* err) {
    const std::size_t n = zs.size();
    if (n < 6) return std::nullopt;
    const cplx zN = zs.back();
    const double floor = 1e-15 * (1 + std::abs(zN));
    std::vector<double> d;
    for (std::size_t i = n - 7 < n ? n - 7 : 0; i + 1 < n; ++i) d.push_back(std::abs(zs[i + 1] - zs[i]));
    if (d.back() <= floor) {
        if (err) *err = floor;
        return zN;
    }
    double q = 0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i] <= floor) continue;
        q = std::max(q, d[i + 1] / d[i]);
    }
    if (!(q < 0.95)) {
        if (err) *err = d.back();
        return std::nullopt;
    }
    double e = std::max(d.back() * q / (1 - q), floor);
    cplx est = zN;
    cplx d1 = zs[n - 1] - zs[n - 2], d0 = zs[n - 2] - zs[n - 3];
    cplx den = d1 - d0;
    if (std::abs(den) > 0) {
        cplx corr = d1 * d1 / den;
        if (std::abs(corr) <= e) est = zN - corr;
    }
    if (err) *err = e;
    if (e >= tol) return std::nullopt;
    return est;
}

std::optional<cplx> landing_point(const ExternalRay& ray, double tol, double* err) {
    if (ray.status == RayStatus::Obstructed) return std::nullopt;
    std::vector<cplx> zs;
    for (auto& p : ray.points) zs.push_back(p.z);
    return detail::tail_limit(zs, tol, err);
}

ExternalRay trace_and_land(const CubicParam& a, const Angle& theta, const RayOptions& opt) {
    ExternalRay ray = trace_external_ray(a, theta, opt);
    double err = 0;
    auto z = landing_point(ray, opt.tol.landing, &err);
    if (!z && ray.status != RayStatus::Obstructed) {
        RayOptions deep = opt;
        const double G0 = std::log(opt.escape_radius);
        deep.target_potential = G0 * std::pow(opt.target_potential / G0, 3.0);
        ray = trace_external_ray(a, theta, deep);
        z = landing_point(ray, opt.tol.landing, &err);
    }
    ray.landing_error = err;
    if (z) {
        ray.status = RayStatus::Landed;
        ray.landing = *z;
    } else if (!ray.points.empty()) {
        ray.landing = ray.points.back().z;
    }
    return ray;
}

double external_angle_of(const CubicParam& a, cplx z, int steps_per_level) {
    const double R = 1e6;
    double g = green_external(a, z, 4000);
    if (!(g > 0)) throw numerical("point is not in the basin of infinity");
    int m = 0;
    cplx w = z;
    while (std::abs(w) < R) {
        w = evaluate(a, w);
        ++m;
        if (m > 4000) throw numerical("escape budget exceeded");
    }
    // climb the ray through z, one third of a level per substep group
    const double fac = std::pow(3.0, 1.0 / steps_per_level);
    while (m > 0) {
        for (int j = 0; j < steps_per_level; ++j) {
            cplx phi = bottcher_external(a, iterate(a, z, m));
            double step = 1.0;
            cplx zn = z;
            for (;;) {
                cplx Wj = phi * std::pow(std::abs(phi), std::pow(fac, step) - 1.0);
                auto r = solve_iterate(a, m, bottcher_external_inverse(a, Wj), z);
                if (r && std::abs(*r - z) < 0.5 * std::min(std::abs(*r - siblings(a, *r).first),
                                                             std::abs(*r - siblings(a, *r).second))) {
                    zn = *r;
                    break;
                }
                step *= 0.5;
                if (step < 1e-6) throw numerical("external angle climb failed");
            }
            z = zn;
        }
        while (m > 0 && std::abs(iterate(a, z, m - 1)) > R) --m;
    }
    double t = std::arg(bottcher_external(a, z)) / (2 * M_PI);
    return t < 0 ? t + 1 : t;
}

// ---------------------------------------------------------------- classes

ExternalClass external_class_of(const CubicParam& a, cplx landing, const AngleSet& candidates, double tol,
                                std::optional<cplx> inward, const RayOptions& opt) {
    const auto& cand = candidates.members();
    std::vector<ExternalRay> rays(cand.size());
    tbb::parallel_for(std::size_t(0), cand.size(), [&](std::size_t i) { rays[i] = trace_and_land(a, cand[i], opt); });
    ExternalClass ec;
    ec.landing = landing;
    std::vector<Angle> hit;
    std::vector<const ExternalRay*> hr;
    for (std::size_t i = 0; i < cand.size(); ++i)
        if (rays[i].status == RayStatus::Landed && std::abs(rays[i].landing - landing) < tol) {
            hit.push_back(cand[i]);
            hr.push_back(&rays[i]);
        }
    if (hit.empty()) throw numerical("no ray found — enlarge candidate set");
    ec.angles = AngleSet(hit);
    ec.preferred = hit.front();
    if (inward && hit.size() > 1) {
        // direction of each ray at a common small radius
        double rho = 1e300;
        for (auto* r : hr) rho = std::min(rho, std::abs(r->points.front().z - landing));
        rho = std::max(1e-3 * rho, 1e-7);
        double base = std::arg(*inward), best = 1e300;
        for (std::size_t i = 0; i < hr.size(); ++i) {
            cplx dir = hr[i]->points.back().z - landing;
            for (auto& p : hr[i]->points)
                if (std::abs(p.z - landing) < rho) { dir = p.z - landing; break; }
            double d = std::fmod(std::arg(dir) - base + 4 * M_PI, 2 * M_PI);
            if (d < best) { best = d; ec.preferred = hit[i]; }
        }
    }
    return ec;
}

}
