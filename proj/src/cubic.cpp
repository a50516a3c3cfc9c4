#include "lamlab/dynamics.hpp"
#include "lamlab/error.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <deque>

namespace lamlab {

cplx iterate(const CubicParam& a, cplx z, int n, cplx* dz) {
    cplx d = 1.0;
    for (int i = 0; i < n; ++i) {
        d *= derivative(a, z);
        z = evaluate(a, z);
    }
    if (dz) *dz = d;
    return z;
}

std::vector<cplx> preimages(const CubicParam& a, cplx w) {
    // depressed cubic z^3 + pz + q
    const cplx p = -3.0 * a.c * a.c, q = a.b() - w;
    const cplx om = std::polar(1.0, 2.0 * M_PI / 3.0);
    cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    cplx s1 = -q / 2.0 + disc, s2 = -q / 2.0 - disc;
    cplx s = std::abs(s1) >= std::abs(s2) ? s1 : s2;
    std::vector<cplx> r(3);
    if (std::abs(s) == 0.0) {
        r = {0.0, 0.0, 0.0};
    } else {
        cplx u = std::pow(s, 1.0 / 3.0);
        cplx v = -p / (3.0 * u);
        r = {u + v, om * u + om * om * v, om * om * u + om * v};
    }
    for (auto& z : r)
        for (int it = 0; it < 3; ++it) {
            cplx fp = derivative(a, z);
            if (std::abs(fp) < 1e-12) break;
            cplx step = (evaluate(a, z) - w) / fp;
            if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3 * (1 + std::abs(z))) break;
            z -= step;
        }
    return r;
}

// ---------------------------------------------------------------- infinity

cplx bottcher_external(const CubicParam& a, cplx z) {
    const cplx b = a.b(), c2 = 3.0 * a.c * a.c;
    cplx phi = z;
    double w = 1.0 / 3.0;
    for (int k = 0; k < 60; ++k) {
        cplx eps = (b - c2 * z) / (z * z * z);
        phi *= std::pow(1.0 + eps, w);
        if (std::abs(eps) * w < 1e-18) break;
        z = evaluate(a, z);
        w /= 3.0;
        if (!std::isfinite(std::abs(z))) break;
    }
    return phi;
}

cplx bottcher_external_inverse(const CubicParam& a, cplx w) {
    cplx z = w;
    for (int it = 0; it < 60; ++it) {
        cplx ph = bottcher_external(a, z);
        // phi(z) ~ z (1 + O(1/z^2)), so phi'(z) ~ phi(z)/z
        cplx step = (ph - w) * z / ph;
        z -= step;
        if (std::abs(step) < 1e-16 * std::abs(z)) break;
    }
    return z;
}

double green_external(const CubicParam& a, cplx z, int budget) {
    if (budget < 1) throw precondition("budget must be >= 1");
    double scale = 1.0;
    for (int n = 0; n <= budget; ++n) {
        if (std::abs(z) > 1e10) {
            cplx ph = bottcher_external(a, z);
            return scale * std::log(std::abs(ph));
        }
        z = evaluate(a, z);
        scale /= 3.0;
    }
    return 0.0;
}

bool connected_julia(const CubicParam& a, int budget) {
    return green_external(a, a.c, budget) == 0.0 && green_external(a, -a.c, budget) == 0.0;
}

// ---------------------------------------------------------------- cycle

// f(z) - c written as (z - c)^2 (z + 2c) + (v - c), exact at v = c for the fixed case
static cplx closing_gap(const CubicParam& a, cplx z) {
    cplx h = z - a.c;
    return h * h * (z + 2.0 * a.c) + (a.v - a.c);
}

CycleData make_cycle(const CubicParam& a, int p) {
    if (p < 1) throw precondition("period must be >= 1");
    CycleData cy;
    cy.a = a;
    cy.p = p;
    cy.pts.push_back(a.c);
    for (int k = 1; k < p; ++k) cy.pts.push_back(evaluate(a, cy.pts.back()));
    cy.residual = std::abs(closing_gap(a, cy.pts.back()));
    cy.lead = 3.0 * a.c;
    for (int k = 1; k < p; ++k) cy.lead *= derivative(a, cy.pts[k]);
    double s = 1.0;
    if (green_external(a, -a.c, 2000) == 0.0) s = std::min(1.0, exp_green_internal(a, p, -a.c));
    cy.rho = 1e-4 * s * s;
    if (cy.rho < 1e-12) cy.rho = 1e-12;
    return cy;
}

cplx recentred(const CycleData& cy, int k, cplx h, cplx* dh) {
    const cplx ck = cy.pts[k], c2 = cy.a.c * cy.a.c;
    const int k1 = (k + 1) % cy.p;
    cplx e = k1 == 0 ? closing_gap(cy.a, ck) : cplx(0.0);
    cplx lin = 3.0 * (ck * ck - c2);
    if (dh) *dh *= 3.0 * h * h + 6.0 * ck * h + lin;
    return e + h * (lin + h * (3.0 * ck + h));
}

cplx recentred_return(const CycleData& cy, cplx h, cplx* dh) {
    for (int k = 0; k < cy.p; ++k) h = recentred(cy, k, h, dh);
    return h;
}

std::optional<cplx> bottcher_internal(const CycleData& cy, cplx h) {
    if (h == 0.0) return cplx(0.0);
    const cplx A = cy.lead;
    const double closing = cy.residual;
    cplx w = A * h;
    double wt = 0.5;
    for (int n = 0; n < 200; ++n) {
        cplx q = A * h * h;
        if (std::abs(q) < 1e6 * closing) break;
        cplx h1 = recentred_return(cy, h);
        cplx eps = (h1 - q) / q;
        if (!(std::abs(eps) < 1.0)) return std::nullopt;
        w *= std::pow(1.0 + eps, wt);
        if (std::abs(eps) * wt < 1e-18 || h1 == 0.0) break;
        h = h1;
        wt *= 0.5;
    }
    return w;
}

cplx bottcher_internal_inverse(const CycleData& cy, cplx w) {
    if (w == 0.0) return 0.0;
    cplx h = w / cy.lead;
    for (int it = 0; it < 40; ++it) {
        auto f0 = bottcher_internal(cy, h);
        auto fp = bottcher_internal(cy, h * (1.0 + 1e-6));
        auto fm = bottcher_internal(cy, h * (1.0 - 1e-6));
        if (!f0 || !fp || !fm) throw numerical("inverse Bottcher series left its domain");
        cplx d = (*fp - *fm) / (2e-6 * h);
        cplx step = (*f0 - w) / d;
        h -= step;
        if (std::abs(step) < 1e-16 * std::abs(h)) break;
    }
    return h;
}

double exp_green_internal(const CubicParam& a, int p, cplx z, int budget) {
    CycleData cy;
    cy.a = a;
    cy.p = p;
    cy.pts.push_back(a.c);
    for (int k = 1; k < p; ++k) cy.pts.push_back(evaluate(a, cy.pts.back()));
    cy.residual = std::abs(closing_gap(a, cy.pts.back()));
    cy.lead = 3.0 * a.c;
    for (int k = 1; k < p; ++k) cy.lead *= derivative(a, cy.pts[k]);
    const double near = 1e-3 * std::max(std::abs(a.c), 1e-3);
    for (int n = 0; n <= budget; ++n) {
        cplx h = z - a.c;
        if (std::abs(h) < near) {
            // finish in recentred coordinates, where -c is far away
            for (int m = n; m <= budget; ++m) {
                auto ph = bottcher_internal(cy, h);
                if (ph) return std::pow(std::abs(*ph), std::ldexp(1.0, -m));
                h = recentred_return(cy, h);
            }
            return 1.0;
        }
        for (int k = 0; k < p; ++k) z = evaluate(a, z);
        if (!(std::abs(z) < 1e8)) return 1.0;
    }
    return 1.0;
}

// ---------------------------------------------------------------- classification

std::string to_string(MilnorType t) {
    switch (t) {
        case MilnorType::A: return "A";
        case MilnorType::B: return "B";
        case MilnorType::C: return "C";
        case MilnorType::DOrEscape: return "D-or-escape";
        default: return "undecided";
    }
}

GenericCheck generic_check(const CubicParam& a, int p) {
    if (std::abs(a.c) < 1e-12) return {false, "c = -c (degenerate critical points)"};
    cplx z = a.c;
    for (int k = 0; k < p; ++k) {
        if (std::abs(z + a.c) < 1e-9 * (1 + std::abs(a.c))) return {false, "-c lies on the critical cycle"};
        z = evaluate(a, z);
    }
    return {true, ""};
}

TypeInfo classify(const CubicParam& a, int budget, int grid) {
    TypeInfo info;
    if (std::abs(a.c) < 1e-12) throw precondition("non-generic parameter: c = -c");
    int p = 0;
    {
        cplx z = a.c;
        for (int k = 1; k <= budget; ++k) {
            z = evaluate(a, z);
            if (std::abs(z - a.c) < 1e-9 * (1 + std::abs(a.c))) { p = k; break; }
            if (std::abs(z) > 1e8) break;
        }
    }
    if (p == 0) return info;
    info.period = p;
    if (green_external(a, -a.c, 4000) > 0.0) {
        info.type = MilnorType::DOrEscape;
        return info;
    }
    CycleData cy = make_cycle(a, p);
    // capture disks: small enough to lie deep inside each immediate basin
    std::vector<double> rad(p);
    for (int k = 0; k < p; ++k) {
        double sep = 1e9;
        for (int j = 0; j < p; ++j)
            if (j != k) sep = std::min(sep, std::abs(cy.pts[j] - cy.pts[k]));
        sep = std::min(sep, std::abs(cy.pts[k] + a.c));
        rad[k] = 1e-3 * std::min(sep, 1.0);
    }
    const int max_steps = budget * p * 8;
    // (cycle index the f^p-limit is, or -1); also the first entry step
    auto label = [&](cplx z, int* entry = nullptr) {
        for (int n = 0; n <= max_steps; ++n) {
            for (int k = 0; k < p; ++k)
                if (std::abs(z - cy.pts[k]) < rad[k]) {
                    if (entry) *entry = n;
                    return ((k - n) % p + p) % p;
                }
            z = evaluate(a, z);
            if (!(std::abs(z) < 1e6)) return -1;
        }
        return -1;
    };

    int entry = -1;
    if (label(-a.c, &entry) < 0) return info;  // -c not captured within budget

    // box around the cycle, -c, and the orbit of -c until capture
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](cplx z) {
        x0 = std::min(x0, z.real()); x1 = std::max(x1, z.real());
        y0 = std::min(y0, z.imag()); y1 = std::max(y1, z.imag());
    };
    for (auto z : cy.pts) grow(z);
    {
        cplx z = -a.c;
        for (int n = 0; n <= entry; ++n) { grow(z); z = evaluate(a, z); }
    }
    double span = std::max({x1 - x0, y1 - y0, 0.5});
    x0 -= 0.5 * span; x1 += 0.5 * span; y0 -= 0.5 * span; y1 += 0.5 * span;
    span = std::max(x1 - x0, y1 - y0);
    const double h = span / grid;
    std::vector<int> lab(std::size_t(grid) * grid);
    tbb::parallel_for(0, grid, [&](int j) {
        for (int i = 0; i < grid; ++i) lab[std::size_t(j) * grid + i] = label(cplx(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h));
    });
    auto cell = [&](cplx z) {
        int i = std::clamp(int((z.real() - x0) / h), 0, grid - 1);
        int j = std::clamp(int((z.imag() - y0) / h), 0, grid - 1);
        return std::size_t(j) * grid + i;
    };
    std::vector<int> basin(lab.size(), -1);  // immediate basin index
    for (int k = 0; k < p; ++k) {
        std::size_t s = cell(cy.pts[k]);
        if (lab[s] != k) continue;
        std::deque<std::size_t> q{s};
        basin[s] = k;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            int i = int(u % grid), j = int(u / grid);
            const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
            for (int e = 0; e < 4; ++e) {
                int ii = i + di[e], jj = j + dj[e];
                if (ii < 0 || jj < 0 || ii >= grid || jj >= grid) continue;
                std::size_t w = std::size_t(jj) * grid + ii;
                if (basin[w] < 0 && lab[w] == k) { basin[w] = k; q.push_back(w); }
            }
        }
    }
    int k = basin[cell(-a.c)];
    if (k == 0) {
        info.type = MilnorType::A;
        info.ell = 0;
        info.cycle_index = 0;
        info.deg_d = 2;
    } else if (k > 0) {
        info.type = MilnorType::B;
        info.ell = p - k;
        info.cycle_index = k;
        info.deg_d = 3;
    } else {
        info.type = MilnorType::C;
        info.deg_d = 1;
        cplx z = -a.c;
        for (int n = 1; n <= entry + 1; ++n) {
            z = evaluate(a, z);
            bool inbox = z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1;
            if ((inbox && basin[cell(z)] == 0) || std::abs(z - a.c) < rad[0]) { info.ell = n; break; }
        }
        if (info.ell < 0) info.type = MilnorType::Undecided;
    }
    return info;
}

MilnorType classify_type(const CubicParam& a, int budget) { return classify(a, budget).type; }

}
