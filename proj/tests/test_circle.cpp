#include <doctest.h>
#include "lamlab/circle.hpp"
#include "lamlab/error.hpp"

#include <random>

using namespace lamlab;

namespace {
Angle A(long long n, long long d) { return Angle(n, d); }

// independent orbit oracle on machine integers
std::pair<int, int> orbit_oracle(int d, long long n, long long q) {
    std::vector<long long> seq;
    long long x = n % q;
    for (int i = 0; i < 10000; ++i) {
        for (std::size_t j = 0; j < seq.size(); ++j)
            if (seq[j] == x) return {int(j), int(seq.size() - j)};
        seq.push_back(x);
        x = (x * d) % q;
    }
    return {-1, -1};
}

Angle random_angle(std::mt19937& rng, int max_den) {
    std::uniform_int_distribution<int> qd(1, max_den);
    int q = qd(rng);
    std::uniform_int_distribution<int> nd(0, q - 1);
    return Angle(nd(rng), q);
}
}

TEST_CASE("tau examples") {
    CHECK(tau(3, A(1, 8)) == A(3, 8));
    CHECK(tau(3, A(2, 3)) == A(0, 1));
    CHECK(tau(2, A(5, 7)) == A(3, 7));
    CHECK(tau(3, A(2, 3)).str() == "0/1");
}

TEST_CASE("angle normalisation and parsing") {
    CHECK(Angle(10, 12) == A(5, 6));
    CHECK(Angle(-1, 4) == A(3, 4));
    CHECK(Angle(7, 4) == A(3, 4));
    CHECK(Angle::parse("5/12") == A(5, 12));
    CHECK(Angle::parse("0/1") == Angle());
    CHECK_THROWS(Angle::parse("2/4"));
    CHECK_THROWS(Angle::parse("5/4"));
    CHECK_THROWS(Angle::parse("abc"));
    CHECK_THROWS(Angle::parse("1/0"));
    CHECK_THROWS(Angle(1, 0));
    BigInt big = BigInt(1) << 200;
    Angle h(big / 2 + 1, big);
    CHECK(Angle::parse(h.str()) == h);
}

TEST_CASE("orbit_type examples") {
    CHECK(orbit_type(3, A(1, 2)) == OrbitType{0, 1});
    CHECK(orbit_type(3, A(1, 8)) == OrbitType{0, 2});
    CHECK(orbit_type(3, A(1, 6)) == OrbitType{1, 1});
    CHECK(orbit_type(2, A(1, 3)) == OrbitType{0, 2});
    CHECK(orbit_type(2, A(1, 2)) == OrbitType{1, 1});
}

TEST_CASE("orbit_type agrees with integer oracle and order law") {
    for (int q = 1; q <= 100; ++q)
        for (int n = 0; n < q; ++n) {
            if (std::gcd(n, q) != 1) continue;
            auto [pre, per] = orbit_oracle(3, n, q);
            OrbitType t = orbit_type(3, A(n, q));
            CHECK(t.preperiod == std::uint64_t(pre));
            CHECK(t.period == std::uint64_t(per));
            int m = q;
            while (m % 3 == 0) m /= 3;
            int ord = 1;
            if (m > 1) {
                long long x = 3 % m;
                while (x != 1) { x = x * 3 % m; ++ord; }
            }
            CHECK(ord % int(t.period) == 0);
        }
}

TEST_CASE("positive cyclic order") {
    CHECK(positive_cyclic_order({A(1, 10), A(4, 10), A(7, 10)}));
    CHECK_FALSE(positive_cyclic_order({A(1, 10), A(7, 10), A(4, 10)}));
    CHECK(positive_cyclic_order({A(9, 10), A(0, 1), A(2, 10)}));
    CHECK_THROWS_WITH(positive_cyclic_order({A(1, 3), A(1, 3), A(1, 2)}), "degenerate tuple");

    std::mt19937 rng(7);
    for (int it = 0; it < 300; ++it) {
        std::vector<Angle> v{random_angle(rng, 40), random_angle(rng, 40), random_angle(rng, 40), random_angle(rng, 40)};
        AngleSet s(v);
        if (s.size() != 4) continue;
        bool p = positive_cyclic_order(v);
        std::vector<Angle> rot{v[1], v[2], v[3], v[0]};
        CHECK(positive_cyclic_order(rot) == p);
        std::vector<Angle> refl;
        for (const auto& x : v) refl.push_back(Angle(-x.num(), x.den()));
        // reflection reverses orientation: a positively ordered tuple becomes negatively ordered
        if (p) {
            CHECK_FALSE(positive_cyclic_order(refl));
            std::vector<Angle> rev(refl.rbegin(), refl.rend());
            CHECK(positive_cyclic_order(rev));
        }
    }
}

TEST_CASE("interval length") {
    CHECK(interval_length(A(1, 4), A(3, 4)) == Rational(1, 2));
    CHECK(interval_length(A(3, 4), A(1, 4)) == Rational(1, 2));
    CHECK(interval_length(A(2, 3), A(1, 3)) == Rational(2, 3));
    CHECK_THROWS_WITH(interval_length(A(1, 3), A(1, 3)), "empty or full interval");
    std::mt19937 rng(11);
    for (int it = 0; it < 500; ++it) {
        Angle a = random_angle(rng, 100), b = random_angle(rng, 100);
        if (a == b) continue;
        CHECK(interval_length(a, b) + interval_length(b, a) == 1);
        CHECK(interval_length(a, b) > 0);
    }
}

TEST_CASE("class gap") {
    CHECK(class_gap(AngleSet{A(0, 1), A(1, 3), A(2, 3)}) == Rational(1, 3));
    CHECK(class_gap(AngleSet{A(1, 12), A(5, 12)}) == Rational(1, 3));
    CHECK(class_gap(AngleSet{A(1, 7), A(2, 7), A(4, 7)}) == Rational(1, 7));
    CHECK_THROWS_WITH(class_gap(AngleSet{A(1, 2)}), "gap undefined");
}

TEST_CASE("unlinked") {
    CHECK(unlinked(AngleSet{A(1, 10), A(2, 10)}, AngleSet{A(3, 10), A(4, 10)}));
    CHECK_FALSE(unlinked(AngleSet{A(1, 10), A(3, 10)}, AngleSet{A(2, 10), A(4, 10)}));
    CHECK(unlinked(AngleSet{A(1, 3)}, AngleSet{A(1, 2), A(2, 3)}));
    CHECK_THROWS_WITH(unlinked(AngleSet{A(1, 3), A(1, 2)}, AngleSet{A(1, 2)}), "sets not disjoint");

    // symmetry, and agreement with the chord-crossing definition on pairs
    std::mt19937 rng(3);
    for (int it = 0; it < 2000; ++it) {
        std::vector<Angle> e, f;
        int ne = 1 + rng() % 4, nf = 1 + rng() % 4;
        for (int i = 0; i < ne; ++i) e.push_back(random_angle(rng, 100));
        for (int i = 0; i < nf; ++i) f.push_back(random_angle(rng, 100));
        AngleSet E(e), F(f);
        if (E.intersects(F)) continue;
        bool u = unlinked(E, F);
        CHECK(u == unlinked(F, E));
        bool crossing = false;
        for (std::size_t i = 0; i < E.size(); ++i)
            for (std::size_t j = i + 1; j < E.size(); ++j)
                for (std::size_t k = 0; k < F.size(); ++k)
                    for (std::size_t l = k + 1; l < F.size(); ++l)
                        if (in_open_arc(F[k], E[i], E[j]) != in_open_arc(F[l], E[i], E[j])) crossing = true;
        CHECK(u == !crossing);
    }
}

TEST_CASE("periodic angles") {
    AngleSet p = periodic_angles(3, 8);
    CHECK(p.contains(A(0, 1)));
    CHECK(p.contains(A(1, 2)));
    CHECK(p.contains(A(1, 5)));
    CHECK(p.contains(A(7, 8)));
    CHECK_FALSE(p.contains(A(1, 3)));
    CHECK_FALSE(p.contains(A(1, 6)));
    for (const auto& a : angles_up_to(8))
        CHECK(p.contains(a) == (orbit_type(3, a).preperiod == 0));
    CHECK(periodic_angles(3, 2) == AngleSet{A(0, 1), A(1, 2)});
    CHECK(periodic_angles(2, 3) == AngleSet{A(0, 1), A(1, 3), A(2, 3)});
}

TEST_CASE("tau surjective with d preimages") {
    for (const auto& a : angles_up_to(200)) {
        if (std::gcd(static_cast<long long>(a.den()), 3LL) != 1) continue;
        auto pre = tau_preimages(3, a);
        REQUIRE(pre.size() == 3);
        CHECK(AngleSet(pre).size() == 3);
        for (const auto& x : pre) CHECK(tau(3, x) == a);
    }
}
