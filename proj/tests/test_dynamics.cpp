#include <doctest.h>
#include "lamlab/dynamics.hpp"
#include "lamlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace lamlab;

namespace {

Angle A(long long n, long long d) { return Angle(n, d); }

cplx expi(double t) { return std::polar(1.0, 2 * M_PI * t); }

// largest real fixed point of z^3 - 3c^2 z + 2c^3 + c for real c, by bisection
double beta_real(double c) {
    auto g = [&](double z) { return z * z * z - 3 * c * c * z + 2 * c * c * c + c - z; };
    double lo = 0.5, hi = 3;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (g(m) > 0 ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

// internal Bottcher coordinate of -c for the family (c, c): the product formula around the
// super-attracting fixed point c, with f(c + h) = c + 3c h^2 + h^3
double phi_product(double c) {
    double lam = 3 * c, h = -2 * c, w = lam * h;
    for (int k = 0; k < 60; ++k) {
        w *= std::pow(1 + h / lam, std::ldexp(1.0, -(k + 1)));
        h = lam * h * h + h * h * h;
    }
    return w;
}

}

TEST_CASE("iterate and preimages") {
    CubicParam a{{0.3, 0.1}, {-0.2, 0.4}};
    cplx z{0.7, -0.2}, dz;
    cplx manual = z, dman = 1;
    for (int i = 0; i < 4; ++i) {
        dman *= derivative(a, manual);
        manual = evaluate(a, manual);
    }
    CHECK(std::abs(iterate(a, z, 4, &dz) - manual) < 1e-12);
    CHECK(std::abs(dz - dman) < 1e-10 * std::abs(dman));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int it = 0; it < 100; ++it) {
        cplx w{u(rng), u(rng)};
        auto pre = preimages(a, w);
        REQUIRE(pre.size() == 3);
        for (auto p : pre) CHECK(std::abs(evaluate(a, p) - w) < 1e-10);
    }
}

TEST_CASE("Green function and Bottcher coordinate at infinity") {
    CubicParam z3{};
    for (cplx z : {cplx(2, 0), cplx(0.3, 1.1), cplx(-5, 2)}) CHECK(green_external(z3, z) == doctest::Approx(std::log(std::abs(z))));
    CHECK(green_external(z3, cplx(0.5, 0.5)) == 0.0);

    CubicParam a{{0.3, 0}, {0.3, 0}};
    for (cplx z : {cplx(6, 1), cplx(-4, 5), cplx(0, -8)}) {
        cplx phi = bottcher_external(a, z);
        CHECK(std::log(std::abs(phi)) == doctest::Approx(green_external(a, z)).epsilon(1e-10));
        // functional equation phi(f(z)) = phi(z)^3
        cplx lhs = bottcher_external(a, evaluate(a, z)), rhs = phi * phi * phi;
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
        CHECK(std::abs(bottcher_external_inverse(a, phi) - z) < 1e-10 * std::abs(z));
    }
    CHECK(connected_julia(a));
    CHECK_FALSE(connected_julia(CubicParam{{0, 0}, {2, 0}}));
}

TEST_CASE("external rays of z^3 land on the unit circle") {
    CubicParam z3{};
    for (auto t : {A(0, 1), A(1, 7), A(2, 9), A(5, 26), A(1, 3)}) {
        auto ray = trace_and_land(z3, t);
        REQUIRE(ray.status == RayStatus::Landed);
        CHECK(std::abs(ray.landing - expi(t.to_double())) < 1e-9);
        CHECK(ray.max_residual < 1e-10);
    }
    CHECK(external_angle_of(z3, 1.5 * expi(0.2)) == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("ray landings at real parameters match fixed-point oracles") {
    // the 0-ray lands at the real beta fixed point; the 1/3-ray at its other preimage above
    // the real axis
    for (double c : {0.3, 0.49224126340672053}) {
        CubicParam a{{c, 0}, {c, 0}};
        double b = beta_real(c);
        auto r0 = trace_and_land(a, A(0, 1));
        REQUIRE(r0.status == RayStatus::Landed);
        CHECK(std::abs(r0.landing - b) < 1e-8);
        cplx pre{-b / 2, std::sqrt(3 * b * b - 12 * c * c) / 2};
        auto r3 = trace_and_land(a, A(1, 3));
        REQUIRE(r3.status == RayStatus::Landed);
        CHECK(std::abs(r3.landing - pre) < 1e-8);
    }
    // frozen values of the oracles above
    CHECK(beta_real(0.3) == doctest::Approx(0.946585609973065).epsilon(1e-14));
    double b = beta_real(0.49224126340672053);
    CHECK(-b / 2 == doctest::Approx(-0.49846568685268067).epsilon(1e-12));
    CHECK(std::sqrt(3 * b * b - 12 * 0.49224126340672053 * 0.49224126340672053) / 2 ==
          doctest::Approx(0.13601374455477216).epsilon(1e-10));
    CHECK(phi_product(0.3) == doctest::Approx(-0.32125214226254156).epsilon(1e-13));
}

TEST_CASE("external equivariance at the witness") {
    CubicParam a{{0.3, 0}, {0.3, 0}};
    auto rep = empirical_rational_lamination_report(a, 20, 1e-6);
    std::map<Angle, cplx> land;
    for (auto& r : rep.rays) land[r.theta] = r.landing;
    double worst = 0;
    for (auto& [t, z] : land) worst = std::max(worst, std::abs(land.at(tau(3, t)) - evaluate(a, z)));
    CHECK(worst < 1e-6);
    CHECK(rep.axioms.ok());
    // the interior of the main component carries a quasicircle: no identifications
    CHECK(rep.lam.size() == 0);
}

TEST_CASE("z^3: rational lamination is trivial") {
    auto lam = empirical_rational_lamination(CubicParam{}, 12, 1e-6);
    CHECK(lam.size() == 0);
}

TEST_CASE("tail limit and clustering") {
    std::vector<cplx> zs;
    for (int n = 0; n < 40; ++n) zs.push_back(cplx(1, 2) + std::pow(0.5, n) * cplx(1, -1));
    double err = 0;
    auto lim = detail::tail_limit(zs, 1e-8, &err);
    REQUIRE(lim);
    CHECK(std::abs(*lim - cplx(1, 2)) < 1e-10);
    CHECK(err < 1e-8);
    std::vector<cplx> growing{1, 2, 4, 8, 16};
    CHECK_FALSE(detail::tail_limit(growing, 1e-8, &err));

    // single linkage: a chain of near points is one cluster
    std::vector<cplx> pts{0, 1e-7, 2e-7, 1, 1 + 5e-7, 3};
    auto cl = cluster_points(pts, 1.5e-7);
    std::vector<std::size_t> sizes;
    for (auto& g : cl) sizes.push_back(g.size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{1, 1, 1, 3});
    CHECK(cluster_points(pts, 1e-6).size() == 3);
}

TEST_CASE("classification of the witness") {
    CubicParam a{{0.3, 0}, {0.3, 0}};
    TypeInfo ti = classify(a);
    CHECK(ti.type == MilnorType::A);
    CHECK(ti.period == 1);
    CHECK(ti.ell == 0);
    CHECK(ti.deg_d == 2);
    // on the slice with -c escaping: f(-1) = 5
    CHECK(classify_type(CubicParam{{1, 0}, {1, 0}}) == MilnorType::DOrEscape);
    CHECK_FALSE(generic_check(CubicParam{}, 1).ok);
    CHECK(generic_check(a, 1).ok);
}

TEST_CASE("internal Bottcher coordinate") {
    CubicParam a{{0.3, 0}, {0.3, 0}};
    CycleData cy = make_cycle(a, 1);
    CHECK(cy.residual < 1e-14);
    auto phi = bottcher_internal(cy, -2.0 * a.c);
    REQUIRE(phi);
    CHECK(std::abs(*phi - phi_product(0.3)) < 1e-12);
    // inverse on the model disk
    for (cplx w : {cplx(5e-5, 0), cplx(0, -3e-5), cplx(2e-5, 4e-5)}) {
        cplx h = bottcher_internal_inverse(cy, w);
        auto back = bottcher_internal(cy, h);
        REQUIRE(back);
        CHECK(std::abs(*back - w) < 1e-12);
    }
    // functional equation phi(f(z)) = phi(z)^2 on the Bottcher disk
    for (cplx h : {cplx(0.1, 0), cplx(-0.05, 0.2), cplx(0.3, -0.3)}) {
        auto p0 = bottcher_internal(cy, h), p1 = bottcher_internal(cy, recentred_return(cy, h));
        REQUIRE(p0);
        REQUIRE(p1);
        CHECK(std::abs(*p1 - *p0 * *p0) < 1e-9);
    }
    CHECK(exp_green_internal(a, 1, -a.c) == doctest::Approx(std::abs(phi_product(0.3))).epsilon(1e-10));
}

TEST_CASE("ray preconditions") {
    CubicParam esc{{0.3, 0}, {3, 0}};
    RayOptions o;
    o.steps_per_level = 0;
    CHECK_THROWS_AS(trace_external_ray(CubicParam{}, A(1, 3), o), Error);
    auto ray = trace_external_ray(esc, A(1, 3));
    CHECK(ray.status != RayStatus::Landed);
}
