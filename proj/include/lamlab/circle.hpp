#pragma once
// Exact arithmetic on the circle R/Z.
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace lamlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class Angle {
public:
    Angle() : num_(0), den_(1) {}
    // Reduces num/den into [0,1); den must be positive.
    Angle(const BigInt& num, const BigInt& den);
    Angle(long long num, long long den) : Angle(BigInt(num), BigInt(den)) {}

    // Strict parse of "num/den": rejects unreduced or out-of-range fractions.
    static Angle parse(const std::string& s);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    std::string str() const;
    double to_double() const;
    Rational value() const { return Rational(num_, den_); }

    bool operator==(const Angle& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Angle& o) const { return !(*this == o); }
    bool operator<(const Angle& o) const { return num_ * o.den_ < o.num_ * den_; }
    bool operator>(const Angle& o) const { return o < *this; }
    bool operator<=(const Angle& o) const { return !(o < *this); }

    Angle operator+(const Angle& o) const { return Angle(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
    Angle operator-(const Angle& o) const { return Angle(num_ * o.den_ - o.num_ * den_ + den_ * o.den_, den_ * o.den_); }

private:
    BigInt num_, den_;
};

struct OrbitType {
    std::uint64_t preperiod = 0;
    std::uint64_t period = 1;
    bool operator==(const OrbitType&) const = default;
};

Angle tau(int d, const Angle& theta);
// The d preimages of theta under tau_d, sorted.
std::vector<Angle> tau_preimages(int d, const Angle& theta);
OrbitType orbit_type(int d, const Angle& theta);

// theta in the open arc (a,b)_+ (counterclockwise from a to b). a == b means
// the circle minus a.
bool in_open_arc(const Angle& x, const Angle& a, const Angle& b);
// Three distinct angles in counterclockwise order.
bool ccw(const Angle& a, const Angle& b, const Angle& c);
bool positive_cyclic_order(const std::vector<Angle>& list);
Rational interval_length(const Angle& a, const Angle& b);

class AngleSet {
public:
    AngleSet() = default;
    AngleSet(std::vector<Angle> members);
    AngleSet(std::initializer_list<Angle> l) : AngleSet(std::vector<Angle>(l)) {}

    std::size_t size() const { return m_.size(); }
    bool empty() const { return m_.empty(); }
    const Angle& operator[](std::size_t i) const { return m_[i]; }
    const std::vector<Angle>& members() const { return m_; }
    auto begin() const { return m_.begin(); }
    auto end() const { return m_.end(); }
    bool contains(const Angle& a) const;
    bool intersects(const AngleSet& o) const;
    std::string str() const;

    bool operator==(const AngleSet& o) const { return m_ == o.m_; }
    bool operator!=(const AngleSet& o) const { return !(*this == o); }
    // lexicographic by members
    bool operator<(const AngleSet& o) const;

private:
    std::vector<Angle> m_;
};

Rational class_gap(const AngleSet& e);
bool unlinked(const AngleSet& e, const AngleSet& f);
AngleSet tau_image(int d, const AngleSet& e);
AngleSet periodic_angles(int d, int max_den);
// All reduced fractions in [0,1) with den <= max_den, sorted by value.
std::vector<Angle> angles_up_to(int max_den);

}
