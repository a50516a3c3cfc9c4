#include "lamlab/circle.hpp"
#include "lamlab/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace lamlab {

namespace {
BigInt mod_pos(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}
// (b - a) mod 1 as a rational in [0,1)
Rational cyc_diff(const Angle& a, const Angle& b) {
    BigInt n = b.num() * a.den() - a.num() * b.den();
    BigInt d = a.den() * b.den();
    return Rational(mod_pos(n, d), d);
}
}

Angle::Angle(const BigInt& num, const BigInt& den) {
    if (den <= 0) throw precondition("angle denominator must be positive");
    num_ = mod_pos(num, den);
    den_ = den;
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (num_ == 0) den_ = 1;
}

Angle Angle::parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == s.size())
        throw parse_error("malformed angle '" + s + "'");
    auto digits = [](const std::string& t) {
        return !t.empty() && std::all_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
    };
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (!digits(a) || !digits(b)) throw parse_error("malformed angle '" + s + "'");
    BigInt n(a), d(b);
    if (d == 0) throw parse_error("zero denominator in '" + s + "'");
    if (n >= d) throw validation("angle out of range [0,1): '" + s + "'");
    if (boost::multiprecision::gcd(n, d) != 1 || (n == 0 && d != 1))
        throw validation("unreduced fraction '" + s + "'");
    return Angle(n, d);
}

std::string Angle::str() const { return num_.str() + "/" + den_.str(); }

double Angle::to_double() const {
    // exact enough for any denominator: divide in rational then convert
    return static_cast<double>(Rational(num_, den_));
}

Angle tau(int d, const Angle& theta) {
    if (d < 2) throw precondition("degree must be >= 2");
    return Angle(theta.num() * d, theta.den());
}

std::vector<Angle> tau_preimages(int d, const Angle& theta) {
    std::vector<Angle> out;
    out.reserve(d);
    for (int j = 0; j < d; ++j) out.emplace_back(theta.num() + j * theta.den(), theta.den() * d);
    std::sort(out.begin(), out.end());
    return out;
}

OrbitType orbit_type(int d, const Angle& theta) {
    std::map<Angle, std::uint64_t> seen;
    Angle x = theta;
    std::uint64_t i = 0;
    while (true) {
        auto it = seen.find(x);
        if (it != seen.end()) return {it->second, i - it->second};
        seen.emplace(x, i++);
        x = tau(d, x);
    }
}

bool ccw(const Angle& a, const Angle& b, const Angle& c) {
    return cyc_diff(a, b) < cyc_diff(a, c);
}

bool in_open_arc(const Angle& x, const Angle& a, const Angle& b) {
    if (x == a) return false;
    if (a == b) return true;
    if (x == b) return false;
    return ccw(a, x, b);
}

bool positive_cyclic_order(const std::vector<Angle>& list) {
    if (list.size() < 3) throw precondition("positive_cyclic_order needs at least 3 angles");
    std::vector<Angle> s = list;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw precondition("degenerate tuple");
    auto mn = std::min_element(list.begin(), list.end()) - list.begin();
    const std::size_t n = list.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(list[(mn + i) % n] < list[(mn + i + 1) % n])) return false;
    return true;
}

Rational interval_length(const Angle& a, const Angle& b) {
    if (a == b) throw precondition("empty or full interval");
    return cyc_diff(a, b);
}

AngleSet::AngleSet(std::vector<Angle> members) : m_(std::move(members)) {
    std::sort(m_.begin(), m_.end());
    m_.erase(std::unique(m_.begin(), m_.end()), m_.end());
}

bool AngleSet::contains(const Angle& a) const { return std::binary_search(m_.begin(), m_.end(), a); }

bool AngleSet::intersects(const AngleSet& o) const {
    std::size_t i = 0, j = 0;
    while (i < m_.size() && j < o.m_.size()) {
        if (m_[i] == o.m_[j]) return true;
        if (m_[i] < o.m_[j]) ++i; else ++j;
    }
    return false;
}

std::string AngleSet::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < m_.size(); ++i) s += (i ? "," : "") + m_[i].str();
    return s + "}";
}

bool AngleSet::operator<(const AngleSet& o) const {
    return std::lexicographical_compare(m_.begin(), m_.end(), o.m_.begin(), o.m_.end());
}

Rational class_gap(const AngleSet& e) {
    if (e.size() < 2) throw precondition("gap undefined");
    Rational best = 1;
    for (std::size_t i = 0; i < e.size(); ++i) {
        Rational g = cyc_diff(e[i], e[(i + 1) % e.size()]);
        if (g < best) best = g;
    }
    return best;
}

bool unlinked(const AngleSet& e, const AngleSet& f) {
    if (e.intersects(f)) throw precondition("sets not disjoint");
    if (e.size() < 2 || f.size() < 2) return true;
    const auto& m = e.members();
    auto arc = [&](const Angle& x) {
        return static_cast<std::size_t>(std::upper_bound(m.begin(), m.end(), x) - m.begin()) % m.size();
    };
    std::size_t a0 = arc(f[0]);
    for (const auto& x : f)
        if (arc(x) != a0) return false;
    return true;
}

AngleSet tau_image(int d, const AngleSet& e) {
    std::vector<Angle> v;
    v.reserve(e.size());
    for (const auto& x : e) v.push_back(tau(d, x));
    return AngleSet(std::move(v));
}

std::vector<Angle> angles_up_to(int max_den) {
    std::vector<Angle> out;
    for (int q = 1; q <= max_den; ++q)
        for (int k = 0; k < q; ++k)
            if (std::gcd(k, q) == 1) out.emplace_back(k, q);
    std::sort(out.begin(), out.end());
    return out;
}

AngleSet periodic_angles(int d, int max_den) {
    if (max_den < 2) throw precondition("max_den must be >= 2");
    std::vector<Angle> out;
    for (const auto& a : angles_up_to(max_den))
        if (std::gcd(static_cast<long long>(a.den()), static_cast<long long>(d)) == 1) out.push_back(a);
    return AngleSet(std::move(out));
}

}
