#include "lamlab/parameter.hpp"
#include "lamlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace lamlab {

// ---------------------------------------------------------------- slices

namespace {

// f^n(c) and d/dv of it (db/dv = 1)
cplx orbit_v(const CubicParam& a, int n, cplx* dv) {
    cplx z = a.c, d = 0;
    for (int i = 0; i < n; ++i) {
        d = derivative(a, z) * d + 1.0;
        z = evaluate(a, z);
    }
    *dv = d;
    return z;
}

double slice_residual(const CubicParam& a, int p) {
    cplx d;
    return std::abs(orbit_v(a, p, &d) - a.c);
}

}

SliceParam solve_slice(int p, const CubicParam& seed, double tol) {
    if (p < 1) throw precondition("period must be >= 1");
    if (std::abs(seed.c) < 1e-12) throw precondition("non-generic parameter: c = 0 is a double critical point");
    SliceParam s;
    s.p = p;
    s.a = seed;
    if (p == 1) {
        // f(c) = v, so the slice is the line v = c
        s.a.v = seed.c;
        s.residual = 0;
        return s;
    }
    CubicParam a = seed;
    cplx d;
    double res = std::abs(orbit_v(a, p, &d) - a.c);
    for (int it = 0; it < 100 && res > tol * 1e-2; ++it) {
        cplx g = orbit_v(a, p, &d) - a.c;
        if (d == 0.0) throw numerical("slice Newton: zero derivative");
        cplx step = g / d;
        double lam = 1;
        CubicParam b = a;
        for (;;) {
            b.v = a.v - lam * step;
            double rn = slice_residual(b, p);
            if (rn < res || lam < 1e-10) {
                res = rn;
                break;
            }
            lam *= 0.5;
        }
        if (!std::isfinite(res)) throw numerical("slice Newton diverged");
        bool stuck = std::abs(b.v - a.v) <= 1e-16 * (1 + std::abs(a.v));
        a = b;
        if (stuck) break;
    }
    if (!(res < tol)) throw numerical("slice Newton did not converge: residual " + std::to_string(res));
    // exact period
    for (int q = 1; q < p; ++q)
        if (p % q == 0 && slice_residual(a, q) < 1e-8 * (1 + std::abs(a.c)))
            throw numerical("period collapse: c has period " + std::to_string(q));
    s.a = a;
    s.residual = res;
    return s;
}

// ---------------------------------------------------------------- component map

ComponentRef component_of(const SliceParam& w) {
    TypeInfo ti = classify(w.a);
    if (ti.type != MilnorType::A && ti.type != MilnorType::B && ti.type != MilnorType::C)
        throw precondition("witness is not in a hyperbolic component of type A, B or C (" + to_string(ti.type) + ")");
    if (ti.period != w.p) throw precondition("witness period " + std::to_string(ti.period) + " differs from p");
    ComponentRef r;
    r.type = ti.type;
    r.ell = ti.ell;
    r.deg_d = ti.deg_d;
    r.cycle_index = std::max(ti.cycle_index, 0);
    r.witness = w;
    return r;
}

namespace {

cplx phi_raw(const ComponentRef& ref, const CubicParam& a, std::optional<cplx> near) {
    CycleData cy = make_cycle(a, ref.witness.p);
    cplx z = iterate(a, -a.c, ref.ell);
    cplx h = z - a.c;
    if (auto w = bottcher_internal(cy, h)) return *w;
    // phi(f^p z) = phi(z)^2: push forward until the series applies, then take roots
    cplx hz = h;
    for (int j = 1; j <= 30; ++j) {
        hz = recentred_return(cy, hz);
        auto w = bottcher_internal(cy, hz);
        if (!w) continue;
        cplx ref_dir = near ? *near : cy.lead * h;
        cplx cur = *w;
        // the 2^j-th root nearest ref_dir, one square root at a time
        for (int i = 0; i < j; ++i) cur = std::sqrt(cur);
        double mag = std::abs(cur);
        double base = std::arg(cur), best = 1e300;
        const double n = std::ldexp(1.0, j);
        cplx out = cur;
        for (double k = 0; k < n; ++k) {
            cplx cand = std::polar(mag, base + 2 * M_PI * k / n);
            if (std::abs(cand - ref_dir) < best) {
                best = std::abs(cand - ref_dir);
                out = cand;
            }
        }
        return out;
    }
    throw numerical("need Bottcher extension: co-critical point did not reach the Bottcher domain");
}

}

cplx phi_component(const ComponentRef& ref, const SliceParam& a, std::optional<cplx> near) {
    if (classify_type(a.a) != ref.type) throw precondition("parameter is not in a component of the reference type");
    GenericCheck g = generic_check(a.a, a.p);
    if (!g.ok) throw precondition("non-generic parameter: " + g.reason);
    return phi_raw(ref, a.a, near);
}

std::string to_string(Combinatorics c) { return c == Combinatorics::Periodic ? "periodic" : "non-periodic"; }

Combinatorics combinatorics_of(const ComponentRef& ref, const Angle& t0) {
    FiberAddress x;
    x.cycle_index = ref.cycle_index;
    std::set<std::pair<std::string, Angle>> seen;
    FiberAddress v = x;
    Angle t = t0;
    for (;;) {
        auto [v1, t1] = g_tilde(v, t, ref.witness.p);
        if (v1 == x && t1 == t0) return Combinatorics::Periodic;
        if (!seen.insert({v1.str(), t1}).second) return Combinatorics::NonPeriodic;
        v = v1;
        t = t1;
    }
}

// ---------------------------------------------------------------- parameter rays

namespace {

struct Corrector {
    const ComponentRef& ref;
    int p;
    Tolerances tol;

    CubicParam on_slice(cplx c, cplx v_seed) const {
        if (p == 1) return {c, c};
        return solve_slice(p, {c, v_seed}, tol.slice).a;
    }

    // Newton in c for Phi = target; dphi receives the derivative at the solution
    std::optional<CubicParam> solve(CubicParam a, cplx target, cplx* dphi, double* res) const {
        cplx phi = phi_raw(ref, a, target);
        double r0 = std::abs(phi - target);
        for (int it = 0; it < 40; ++it) {
            const double hstep = 1e-7 * (1 + std::abs(a.c));
            cplx fp = phi_raw(ref, on_slice(a.c + hstep, a.v), phi);
            cplx fm = phi_raw(ref, on_slice(a.c - hstep, a.v), phi);
            cplx d = (fp - fm) / (2 * hstep);
            if (d == 0.0 || !std::isfinite(std::abs(d))) return std::nullopt;
            cplx step = (phi - target) / d;
            double lam = 1;
            CubicParam b;
            cplx phib;
            for (;;) {
                b = on_slice(a.c - lam * step, a.v);
                phib = phi_raw(ref, b, phi);
                if (std::abs(phib - target) < r0 || lam < 1e-6) break;
                lam *= 0.5;
            }
            if (!(std::abs(phib - target) < r0)) break;
            bool small = std::abs(b.c - a.c) <= 1e-15 * (1 + std::abs(a.c));
            a = b;
            phi = phib;
            r0 = std::abs(phi - target);
            *dphi = d;
            if (small || r0 < 1e-15) break;
        }
        *res = r0;
        if (!(r0 < tol.continuation * 1e-3)) return std::nullopt;
        return a;
    }
};

std::vector<double> schedule(double r_min, const ParamRayOptions& opt) {
    std::vector<double> rs;
    for (double r = opt.r_start; r > r_min; r *= opt.ratio) rs.push_back(r);
    for (double w : opt.waypoints)
        if (w > r_min && w <= opt.r_start) rs.push_back(w);
    for (int j = 0; j < opt.node_count; ++j) {
        double r = 0.05 * std::ldexp(1.0, -j);
        if (r > r_min) rs.push_back(r);
    }
    rs.push_back(r_min);
    std::sort(rs.begin(), rs.end(), std::greater<>());
    rs.erase(std::unique(rs.begin(), rs.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), rs.end());
    return rs;
}

}

BoundaryEstimate trace_parameter_ray(const ComponentRef& ref, const Angle& t0, double r_min, int steps,
                                     const ParamRayOptions& opt) {
    if (!(r_min > 0 && r_min < opt.r_start)) throw precondition("r_min must lie in (0, r_start)");
    if (steps < 1) throw precondition("steps must be >= 1");
    BoundaryEstimate est;
    est.p = ref.witness.p;
    est.t0 = t0;
    est.combinatorics = combinatorics_of(ref, t0);
    Corrector cor{ref, ref.witness.p, opt.tol};
    const double arg0 = 2 * M_PI * t0.to_double();

    CubicParam a = ref.witness.a;
    cplx phi = phi_raw(ref, a, std::nullopt);
    if (!(std::abs(phi) > 1e-6 && std::abs(phi) < 1)) throw precondition("witness has |Phi| outside (0,1) or at the center");
    cplx dphi = 0;

    // follow target(s) for s in [0,1] from the current point, halving on failure
    auto follow = [&](auto target) -> bool {
        double s = 0, ds = 1.0 / steps;
        cplx prev_t = target(0.0);
        while (s < 1) {
            double sn = std::min(1.0, s + ds);
            cplx tn = target(sn);
            CubicParam guess = a;
            if (dphi != 0.0) guess = cor.on_slice(a.c + (tn - prev_t) / dphi, a.v);
            double res = 0;
            cplx d = dphi;
            std::optional<CubicParam> r;
            try {
                r = cor.solve(guess, tn, &d, &res);
            } catch (const Error&) {
                r.reset();
            }
            // stay on the same branch of the ray
            if (r && dphi != 0.0 && std::abs(r->c - guess.c) > 0.5 * std::abs(tn - prev_t) / std::abs(dphi) + 1e-12)
                r.reset();
            if (r) {
                a = *r;
                dphi = d;
                s = sn;
                prev_t = tn;
                ds = std::min(1.0 / steps, 2 * ds);
            } else {
                ds *= 0.5;
                if (ds < 1e-9) return false;
            }
        }
        return true;
    };

    // approach: around the circle |Phi| = |Phi(witness)| to angle t0, then radially to 1 - r_start
    const double m0 = std::abs(phi), a0 = std::arg(phi);
    double da = std::remainder(arg0 - a0, 2 * M_PI);
    if (!follow([&](double s) { return std::polar(m0, a0 + s * da); }) ||
        !follow([&](double s) { return std::polar(m0 + s * (1 - opt.r_start - m0), arg0); })) {
        est.status = PathStatus::Stalled;
        est.message = "continuation stalled before reaching the ray";
        return est;
    }
    double r_cur = opt.r_start;
    auto record = [&](double r) {
        PathPoint pt;
        pt.r = r;
        pt.a = a;
        pt.slice_residual = slice_residual(a, est.p);
        pt.phi_residual = std::abs(phi_raw(ref, a, std::polar(1 - r, arg0)) - std::polar(1 - r, arg0));
        est.path.push_back(pt);
    };
    record(r_cur);
    for (double r : schedule(r_min, opt)) {
        if (r >= r_cur) continue;
        double from = r_cur;
        if (!follow([&](double s) { return std::polar(1 - (from + s * (r - from)), arg0); })) {
            est.status = PathStatus::Stalled;
            est.message = "continuation stalled at r = " + std::to_string(from);
            return est;
        }
        r_cur = r;
        record(r);
    }
    return est;
}

PathPoint ray_parameter_at(const ComponentRef& ref, const BoundaryEstimate& est, double r) {
    if (est.path.empty()) throw precondition("empty parameter path");
    const PathPoint* best = &est.path.front();
    for (auto& pt : est.path)
        if (std::abs(pt.r - r) < std::abs(best->r - r)) best = &pt;
    if (std::abs(best->r - r) < 1e-15) return *best;
    ParamRayOptions o;
    Corrector cor{ref, est.p, o.tol};
    const double arg0 = 2 * M_PI * est.t0.to_double();
    CubicParam a = best->a;
    cplx d = 0;
    double res = 0;
    // short radial continuation from the nearest point
    const int n = 16;
    for (int i = 1; i <= n; ++i) {
        double ri = best->r + (r - best->r) * i / n;
        auto s = cor.solve(a, std::polar(1 - ri, arg0), &d, &res);
        if (!s) throw numerical("ray parameter correction failed at r = " + std::to_string(ri));
        a = *s;
    }
    PathPoint pt;
    pt.r = r;
    pt.a = a;
    pt.slice_residual = slice_residual(a, est.p);
    pt.phi_residual = res;
    return pt;
}

// ---------------------------------------------------------------- boundary landing

namespace {

// least-squares polynomial of the given degree through (x_i, y_i), evaluated at 0
cplx extrapolate_zero(const std::vector<double>& x, const std::vector<cplx>& y, int degree) {
    const int n = int(x.size()), m = degree + 1;
    // normal equations, scaled by the largest node
    double s = 0;
    for (double xi : x) s = std::max(s, std::abs(xi));
    std::vector<std::vector<cplx>> A(m, std::vector<cplx>(m + 1, 0.0));
    for (int i = 0; i < n; ++i) {
        std::vector<double> pw(m);
        pw[0] = 1;
        for (int k = 1; k < m; ++k) pw[k] = pw[k - 1] * x[i] / s;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) A[r][c] += pw[r] * pw[c];
            A[r][m] += pw[r] * y[i];
        }
    }
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        if (A[col][col] == 0.0) throw numerical("singular extrapolation system");
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            cplx f = A[r][col] / A[col][col];
            for (int c = col; c <= m; ++c) A[r][c] -= f * A[col][c];
        }
    }
    return A[0][m] / A[0][0];
}

}

void boundary_landing(BoundaryEstimate& est) {
    if (est.path.size() < 8) throw precondition("boundary landing needs at least 8 path points");
    if (est.path.back().r > 0.05) throw precondition("path must reach r <= 0.05");
    std::vector<double> r;
    std::vector<cplx> c, v;
    for (std::size_t i = est.path.size() - 8; i < est.path.size(); ++i) {
        r.push_back(est.path[i].r);
        c.push_back(est.path[i].a.c);
        v.push_back(est.path[i].a.v);
    }
    CubicParam a2{extrapolate_zero(r, c, 2), extrapolate_zero(r, v, 2)};
    CubicParam a3{extrapolate_zero(r, c, 3), extrapolate_zero(r, v, 3)};
    est.extrapolation_gap = std::max(std::abs(a2.c - a3.c), std::abs(a2.v - a3.v));
    est.a0 = a3;
    est.has_a0 = true;
    if (est.extrapolation_gap >= 1e-6) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "extrapolation unstable: orders 2 and 3 differ by %.3g (c2 = %.12g%+.12gi, c3 = %.12g%+.12gi, r in [%.3g, %.3g])",
                      est.extrapolation_gap, a2.c.real(), a2.c.imag(), a3.c.real(), a3.c.imag(), r.back(), r.front());
        throw numerical(buf);
    }
}

void refine_boundary(const ComponentRef& ref, BoundaryEstimate& est, const Angle& theta) {
    if (!est.has_a0) throw precondition("boundary estimate has no extrapolated a0");
    const int p = est.p;
    Corrector cor{ref, p, {}};
    OrbitType ot = orbit_type(3, theta);
    CubicParam a = est.a0;
    if (ot.preperiod > 0) {
        const int k = int(ot.preperiod), n = int(ot.period);
        auto F = [&](cplx c) {
            CubicParam b = cor.on_slice(c, a.v);
            cplx zk = iterate(b, -b.c, k);
            return iterate(b, zk, n) - zk;
        };
        cplx c = a.c;
        cplx f = F(c);
        for (int it = 0; it < 60; ++it) {
            const double h = 1e-7 * (1 + std::abs(c));
            cplx d = (F(c + h) - F(c - h)) / (2 * h);
            if (d == 0.0) break;
            cplx cn = c - f / d;
            cplx fnew = F(cn);
            if (!(std::abs(fnew) < std::abs(f))) break;
            c = cn;
            f = fnew;
        }
        est.a0_refined = cor.on_slice(c, a.v);
        est.refine_residual = std::abs(f);
        est.boundary_kind = "misiurewicz " + std::to_string(k) + "+" + std::to_string(n);
        return;
    }
    // parabolic: f^n(z) = z with (f^n)'(z) = 1, seeded by the landing point of theta at the last path point
    const int n = int(ot.period);
    RayOptions ro;
    ExternalRay ray = trace_and_land(est.path.back().a, theta, ro);
    cplx z = ray.landing, c = a.c;
    auto G = [&](cplx cc, cplx zz, cplx* g2) {
        CubicParam b = cor.on_slice(cc, a.v);
        cplx d;
        cplx w = iterate(b, zz, n, &d);
        *g2 = d - 1.0;
        return w - zz;
    };
    auto norm = [&](cplx cc, cplx zz) {
        cplx g2;
        cplx g1 = G(cc, zz, &g2);
        return std::hypot(std::abs(g1), std::abs(g2));
    };
    double res = norm(c, z);
    for (int it = 0; it < 200; ++it) {
        const double h = 1e-7;
        cplx g1, g2, a1, a2, b1, b2;
        g1 = G(c, z, &g2);
        cplx p1, p2, q1, q2;
        p1 = G(c + h, z, &p2);
        q1 = G(c - h, z, &q2);
        a1 = (p1 - q1) / (2 * h);
        a2 = (p2 - q2) / (2 * h);
        p1 = G(c, z + h, &p2);
        q1 = G(c, z - h, &q2);
        b1 = (p1 - q1) / (2 * h);
        b2 = (p2 - q2) / (2 * h);
        cplx det = a1 * b2 - a2 * b1;
        if (det == 0.0) break;
        cplx dc = (g1 * b2 - g2 * b1) / det, dz = (a1 * g2 - a2 * g1) / det;
        double lam = 1;
        bool moved = false;
        while (lam > 1e-6) {
            double rn = norm(c - lam * dc, z - lam * dz);
            if (rn < res) {
                c -= lam * dc;
                z -= lam * dz;
                res = rn;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!moved) break;
    }
    est.a0_refined = cor.on_slice(c, a.v);
    est.refine_residual = res;
    est.boundary_kind = "parabolic " + std::to_string(n);
}

}
