#include "lamlab/lamination.hpp"
#include "lamlab/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace lamlab {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    std::size_t add() {
        parent.push_back(parent.size());
        return parent.size() - 1;
    }
    std::size_t root(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[root(a)] = root(b); }
};

class AngleUF {
public:
    std::size_t id(const Angle& a) {
        auto it = ids_.find(a);
        if (it != ids_.end()) return it->second;
        angles_.push_back(a);
        return ids_[a] = uf_.add();
    }
    void unite(const Angle& a, const Angle& b) { uf_.unite(id(a), id(b)); }
    std::vector<AngleSet> classes() {
        std::map<std::size_t, std::vector<Angle>> groups;
        for (std::size_t i = 0; i < angles_.size(); ++i) groups[uf_.root(i)].push_back(angles_[i]);
        std::vector<AngleSet> out;
        for (auto& [r, v] : groups)
            if (v.size() >= 2) out.emplace_back(std::move(v));
        return out;
    }
private:
    std::map<Angle, std::size_t> ids_;
    std::vector<Angle> angles_;
    UnionFind uf_;
};

// Pairwise unlinkedness of a family of disjoint sets, by a stack sweep around the circle.
// Returns the indices of a linked pair if one exists.
std::optional<std::pair<std::size_t, std::size_t>> find_crossing(const std::vector<AngleSet>& cls) {
    std::vector<std::pair<Angle, std::size_t>> pts;
    for (std::size_t k = 0; k < cls.size(); ++k)
        for (const auto& a : cls[k]) pts.emplace_back(a, k);
    std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::size_t> seen(cls.size(), 0), stack;
    for (const auto& [a, k] : pts) {
        if (seen[k] == 0) {
            stack.push_back(k);
        } else if (stack.back() != k) {
            return std::make_pair(std::min(k, stack.back()), std::max(k, stack.back()));
        }
        if (++seen[k] == cls[k].size()) stack.pop_back();
    }
    return std::nullopt;
}

// Sorted points of a family of classes with sparse tables over class spans, so that
// "candidate is disjoint from and unlinked with every class" is O(k log n).
class LinkIndex {
public:
    explicit LinkIndex(const std::vector<AngleSet>& cls) : cls_(cls) {
        std::vector<std::pair<Angle, std::size_t>> v;
        for (std::size_t k = 0; k < cls.size(); ++k)
            for (const auto& a : cls[k]) v.emplace_back(a, k);
        std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        const std::size_t n = v.size();
        pts_.reserve(n);
        cid_.reserve(n);
        for (auto& [a, k] : v) { pts_.push_back(a); cid_.push_back(k); }
        std::vector<std::size_t> lo(cls.size(), n), hi(cls.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            lo[cid_[i]] = std::min(lo[cid_[i]], i);
            hi[cid_[i]] = std::max(hi[cid_[i]], i);
        }
        std::size_t levels = 1;
        while ((std::size_t(1) << levels) <= n) ++levels;
        mn_.assign(levels, std::vector<std::size_t>(n));
        mx_.assign(levels, std::vector<std::size_t>(n));
        for (std::size_t i = 0; i < n; ++i) { mn_[0][i] = lo[cid_[i]]; mx_[0][i] = hi[cid_[i]]; }
        for (std::size_t j = 1; j < levels; ++j)
            for (std::size_t i = 0; i + (std::size_t(1) << j) <= n; ++i) {
                std::size_t h = std::size_t(1) << (j - 1);
                mn_[j][i] = std::min(mn_[j - 1][i], mn_[j - 1][i + h]);
                mx_[j][i] = std::max(mx_[j - 1][i], mx_[j - 1][i + h]);
            }
    }

    bool compatible(const AngleSet& c) const {
        std::vector<std::size_t> pos;
        std::optional<std::size_t> hit;
        std::size_t found = 0;
        for (const auto& a : c) {
            std::size_t p = std::lower_bound(pts_.begin(), pts_.end(), a) - pts_.begin();
            if (p < pts_.size() && pts_[p] == a) {
                ++found;
                if (hit && *hit != cid_[p]) return false;
                hit = cid_[p];
            }
            pos.push_back(p);
        }
        if (found) return found == c.size() && cls_[*hit].size() == c.size();
        for (std::size_t j = 0; j + 1 < pos.size(); ++j) {
            std::size_t a = pos[j], b = pos[j + 1];
            if (a == b) continue;
            if (range_min(a, b) < a || range_max(a, b) >= b) return false;
        }
        return true;
    }

private:
    std::size_t range_min(std::size_t a, std::size_t b) const {
        std::size_t j = log2floor(b - a);
        return std::min(mn_[j][a], mn_[j][b - (std::size_t(1) << j)]);
    }
    std::size_t range_max(std::size_t a, std::size_t b) const {
        std::size_t j = log2floor(b - a);
        return std::max(mx_[j][a], mx_[j][b - (std::size_t(1) << j)]);
    }
    static std::size_t log2floor(std::size_t x) {
        std::size_t j = 0;
        while ((std::size_t(2) << j) <= x) ++j;
        return j;
    }

    const std::vector<AngleSet>& cls_;
    std::vector<Angle> pts_;
    std::vector<std::size_t> cid_;
    std::vector<std::vector<std::size_t>> mn_, mx_;
};

bool compatible_brute(const std::vector<AngleSet>& cls, const AngleSet& c) {
    for (const auto& f : cls) {
        if (f == c) return true;
        if (f.intersects(c)) return false;
    }
    for (const auto& f : cls)
        if (!unlinked(f, c)) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------- Lamination

Lamination::Lamination(int degree, std::vector<AngleSet> classes) : degree_(degree) {
    if (degree < 2) throw precondition("degree must be >= 2");
    for (auto& c : classes)
        if (c.size() >= 2) classes_.push_back(std::move(c));
    std::sort(classes_.begin(), classes_.end());
    for (std::size_t k = 0; k < classes_.size(); ++k)
        for (const auto& a : classes_[k])
            if (!index_.emplace(a, k).second) throw validation("classes not disjoint (" + a.str() + ")");
}

std::optional<std::size_t> Lamination::find(const Angle& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

AngleSet Lamination::class_of(const Angle& a) const {
    auto k = find(a);
    return k ? classes_[*k] : AngleSet{a};
}

Lamination Lamination::restricted(int max_den) const {
    std::vector<AngleSet> out;
    for (const auto& c : classes_) {
        std::vector<Angle> keep;
        for (const auto& a : c)
            if (a.den() <= max_den) keep.push_back(a);
        if (keep.size() >= 2) out.emplace_back(std::move(keep));
    }
    return Lamination(degree_, std::move(out));
}

std::size_t Lamination::pair_count() const {
    std::size_t n = 0;
    for (const auto& c : classes_) n += c.size() * (c.size() - 1) / 2;
    return n;
}

std::size_t Lamination::max_class_size() const {
    std::size_t m = 1;
    for (const auto& c : classes_) m = std::max(m, c.size());
    return m;
}

std::string Lamination::to_json() const {
    nlohmann::ordered_json j;
    j["degree"] = degree_;
    j["classes"] = nlohmann::ordered_json::array();
    for (const auto& c : classes_) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& a : c) arr.push_back(a.str());
        j["classes"].push_back(arr);
    }
    return j.dump();
}

Lamination Lamination::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("malformed lamination JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("degree") || !j.contains("classes") || !j["degree"].is_number_integer() ||
        !j["classes"].is_array())
        throw parse_error("lamination JSON needs integer 'degree' and array 'classes'");
    std::vector<AngleSet> cls;
    for (const auto& c : j["classes"]) {
        if (!c.is_array()) throw parse_error("each class must be an array of \"num/den\" strings");
        std::vector<Angle> members;
        for (const auto& a : c) {
            if (!a.is_string()) throw parse_error("angles must be strings \"num/den\"");
            members.push_back(Angle::parse(a.get<std::string>()));
        }
        AngleSet s(members);
        if (s.size() != members.size()) throw validation("classes not disjoint (repeated angle in a class)");
        cls.push_back(std::move(s));
    }
    return Lamination(j["degree"].get<int>(), std::move(cls));
}

Lamination closure(int degree, const std::vector<std::pair<Angle, Angle>>& pairs) {
    AngleUF uf;
    for (const auto& [a, b] : pairs) uf.unite(a, b);
    return Lamination(degree, uf.classes());
}

Lamination join(const Lamination& a, const Lamination& b) {
    if (a.degree() != b.degree()) throw precondition("degree mismatch");
    AngleUF uf;
    for (const auto* l : {&a, &b})
        for (const auto& c : l->classes())
            for (const auto& x : c) uf.unite(c[0], x);
    return Lamination(a.degree(), uf.classes());
}

bool contains(const Lamination& coarse, const Lamination& fine) {
    if (coarse.degree() != fine.degree()) throw precondition("degree mismatch");
    for (const auto& f : fine.classes()) {
        auto k = coarse.find(f[0]);
        if (!k) return false;
        for (const auto& x : f)
            if (coarse.find(x) != k) return false;
    }
    return true;
}

AngleSet tau_class_image(const Lamination& lam, const AngleSet& e) { return tau_image(lam.degree(), e); }

// ---------------------------------------------------------------- axioms

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "finite-support only";
    }
}

bool AxiomReport::ok() const {
    for (const auto* r : {&r2, &r3, &r4, &r5})
        if (r->verdict == Verdict::Fail) return false;
    return true;
}

std::string AxiomReport::summary() const {
    std::ostringstream os;
    const char* names[] = {"R1", "R2", "R3", "R4", "R5"};
    const AxiomResult* rs[] = {&r1, &r2, &r3, &r4, &r5};
    for (int i = 0; i < 5; ++i) {
        os << names[i] << ": " << to_string(rs[i]->verdict);
        if (!rs[i]->witness.empty()) {
            os << " witness";
            for (const auto& w : rs[i]->witness) os << " " << w.str();
        }
        if (!rs[i]->detail.empty()) os << " (" << rs[i]->detail << ")";
        os << "\n";
    }
    return os.str();
}

bool consecutive_preserving(int d, const AngleSet& e) {
    AngleSet img = tau_image(d, e);
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i) {
        Angle a = tau(d, e[i]), b = tau(d, e[(i + 1) % n]);
        if (a == b) {
            if (img.size() != 1) return false;
            continue;
        }
        for (const auto& x : img)
            if (in_open_arc(x, a, b)) return false;
    }
    return true;
}

AxiomReport check_axioms(const Lamination& lam) {
    AxiomReport rep;
    const int d = lam.degree();
    rep.r1.verdict = Verdict::FiniteSupportOnly;
    rep.r1.detail = "closedness is not testable on a finite support";
    rep.r2.detail = "classes are finite by construction";
    for (const auto& e : lam.classes()) {
        AngleSet img = tau_image(d, e);
        bool ok;
        if (img.size() == 1) {
            ok = !lam.find(img[0]).has_value();
        } else {
            auto k = lam.find(img[0]);
            ok = k && lam.classes()[*k] == img;
        }
        if (!ok && rep.r3.verdict == Verdict::Pass) {
            rep.r3.verdict = Verdict::Fail;
            rep.r3.witness = {e, img};
            rep.r3.detail = "image is not a class";
        }
        if (!consecutive_preserving(d, e) && rep.r4.verdict == Verdict::Pass) {
            rep.r4.verdict = Verdict::Fail;
            rep.r4.witness = {e};
            rep.r4.detail = "not consecutive-preserving";
        }
    }
    if (auto x = find_crossing(lam.classes())) {
        rep.r5.verdict = Verdict::Fail;
        rep.r5.witness = {lam.classes()[x->first], lam.classes()[x->second]};
        rep.r5.detail = "linked classes";
    }
    return rep;
}

bool weakly_unlinked(const AngleSet& c, const AngleSet& b) {
    if (b.size() < 2 || c.size() < 2) return true;
    std::vector<Angle> outside;
    for (const auto& x : c)
        if (!b.contains(x)) outside.push_back(x);
    const auto& m = b.members();
    const std::size_t n = m.size();
    if (outside.empty()) {
        if (c == b) return true;
        if (c.size() != 2) return false;
        std::size_t i = std::lower_bound(m.begin(), m.end(), c[0]) - m.begin();
        std::size_t j = std::lower_bound(m.begin(), m.end(), c[1]) - m.begin();
        return (i + 1) % n == j || (j + 1) % n == i;
    }
    auto arc = [&](const Angle& x) {
        return static_cast<std::size_t>(std::upper_bound(m.begin(), m.end(), x) - m.begin()) % n;
    };
    std::size_t k = arc(outside[0]);
    for (const auto& x : outside)
        if (arc(x) != k) return false;
    // the arc k runs from m[k-1] to m[k]
    const Angle& lo = m[(k + n - 1) % n];
    const Angle& hi = m[k];
    for (const auto& x : c)
        if (b.contains(x) && x != lo && x != hi) return false;
    return true;
}

// ---------------------------------------------------------------- generators

GeneratorSpec GeneratorSpec::make(const AngleSet& e_star, int degree) {
    if (e_star.size() != 2) throw validation("invalid generator: E* must have two members");
    GeneratorSpec g;
    g.e_star = e_star;
    g.degree = degree;
    OrbitType a = orbit_type(degree, e_star[0]), b = orbit_type(degree, e_star[1]);
    if (tau(degree, e_star[0]) == tau(degree, e_star[1])) {
        // a periodic endpoint would send the critical value back onto the critical leaf
        if (a.preperiod == 0 || b.preperiod == 0)
            throw validation("invalid generator " + e_star.str() + ": equal images but a member is periodic");
        g.mode = Mode::NonPeriodic;
        return g;
    }
    if (a.preperiod == 0 && b.preperiod == 0 && a.period == b.period) {
        g.mode = Mode::Periodic;
        return g;
    }
    throw validation("invalid generator " + e_star.str() + ": images differ and members are not periodic of equal period");
}

std::vector<AngleSet> default_barriers(const GeneratorSpec& spec) {
    const int d = spec.degree;
    if (spec.mode == GeneratorSpec::Mode::NonPeriodic)
        // the critical polygon: all preimages of the critical value tau(E*)
        return {AngleSet(tau_preimages(d, tau(d, spec.e_star[0])))};
    // Periodic: the full preimage of tau(E*) as non-crossing leaves. When each side of E*
    // carries exactly one sibling leaf, the two polygons spanned by E* and a sibling are
    // the critical gaps on either side of E*.
    AngleSet img = tau_image(d, spec.e_star);
    std::vector<Angle> pa = tau_preimages(d, img[0]), pb = tau_preimages(d, img[1]);
    std::vector<AngleSet> sib;
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<AngleSet>> found;
    do {
        std::vector<AngleSet> leaves;
        for (int j = 0; j < d; ++j) leaves.push_back(AngleSet{pa[j], pb[perm[j]]});
        if (!find_crossing(leaves)) found.push_back(leaves);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<AngleSet> out;
    for (const auto& leaves : found) {
        if (std::find(leaves.begin(), leaves.end(), spec.e_star) == leaves.end()) continue;
        std::vector<AngleSet> side1, side2;
        for (const auto& l : leaves) {
            if (l == spec.e_star) continue;
            (in_open_arc(l[0], spec.e_star[0], spec.e_star[1]) ? side1 : side2).push_back(l);
        }
        if (side1.size() == 1 && side2.size() == 1) {
            std::vector<Angle> q1 = spec.e_star.members(), q2 = spec.e_star.members();
            q1.insert(q1.end(), side1[0].begin(), side1[0].end());
            q2.insert(q2.end(), side2[0].begin(), side2[0].end());
            out = {AngleSet(q1), AngleSet(q2)};
        }
        break;
    }
    return out;
}

// ---------------------------------------------------------------- pullback

namespace detail {

std::vector<std::vector<AngleSet>> pairings(int d, const AngleSet& e, const Compat& compat,
                                            const std::vector<AngleSet>& barriers) {
    if (e.size() < 2) throw precondition("singletons are not pulled back");
    const std::size_t k = e.size();
    std::vector<std::vector<Angle>> pre(k);
    for (std::size_t i = 0; i < k; ++i) pre[i] = tau_preimages(d, e[i]);

    std::map<std::vector<int>, bool> memo;
    auto valid = [&](const std::vector<int>& idx, AngleSet& out) {
        std::vector<Angle> m(k);
        for (std::size_t i = 0; i < k; ++i) m[i] = pre[i][idx[i]];
        out = AngleSet(m);
        auto it = memo.find(idx);
        if (it != memo.end()) return it->second;
        bool ok = out.size() == k && consecutive_preserving(d, out) && compat(out);
        for (const auto& b : barriers)
            if (ok && !weakly_unlinked(out, b)) ok = false;
        memo[idx] = ok;
        return ok;
    };

    std::vector<std::vector<int>> perms(k, std::vector<int>(d));
    for (auto& p : perms) std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<AngleSet>> result;
    // odometer over permutations of every member after the first
    while (true) {
        std::vector<AngleSet> classes(d);
        bool ok = true;
        for (int j = 0; j < d && ok; ++j) {
            std::vector<int> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = perms[i][j];
            ok = valid(idx, classes[j]);
        }
        if (ok && !find_crossing(classes)) {
            std::sort(classes.begin(), classes.end());
            result.push_back(std::move(classes));
        }
        std::size_t i = 1;
        while (i < k && !std::next_permutation(perms[i].begin(), perms[i].end())) ++i;
        if (i >= k) break;
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

}  // namespace detail

std::vector<std::vector<AngleSet>> preimage_pairings(const Lamination& lam, const AngleSet& e,
                                                     const std::vector<AngleSet>& barriers) {
    if (e.size() < 2) throw precondition("singletons are not pulled back");
    const auto& cls = lam.classes();
    auto res = detail::pairings(
        lam.degree(), e, [&](const AngleSet& c) { return compatible_brute(cls, c); }, barriers);
    if (res.empty()) throw validation("obstructed pullback of " + e.str());
    return res;
}

namespace {
std::string describe(const std::vector<std::vector<AngleSet>>& alts) {
    std::string s;
    for (const auto& p : alts) {
        s += "\n  [";
        for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + p[i].str();
        s += "]";
    }
    return s;
}
}

Lamination minimal_from_generator(const GeneratorSpec& spec, int depth) {
    if (depth < 0) throw precondition("depth must be >= 0");
    GeneratorSpec g = GeneratorSpec::make(spec.e_star, spec.degree);
    if (g.mode != spec.mode) throw validation("invalid generator: mode flag inconsistent");
    const int d = g.degree;
    std::vector<AngleSet> barriers = spec.barriers ? *spec.barriers : default_barriers(g);

    std::vector<AngleSet> classes{g.e_star};
    std::set<AngleSet> present{g.e_star};
    if (g.mode == GeneratorSpec::Mode::Periodic) {
        AngleSet x = tau_image(d, g.e_star);
        while (x != g.e_star) {
            if (!present.insert(x).second) throw validation("invalid generator: orbit does not return");
            classes.push_back(x);
            x = tau_image(d, x);
        }
        if (auto c = find_crossing(classes))
            throw validation("invalid generator: orbit classes " + classes[c->first].str() + " and " +
                             classes[c->second].str() + " are linked");
    }
    std::set<AngleSet> expanded;
    std::vector<AngleSet> frontier{g.e_star};
    for (int level = 1; level <= depth && !frontier.empty(); ++level) {
        LinkIndex idx(classes);
        std::vector<AngleSet> fresh, next;
        for (const auto& parent : frontier) {
            if (!expanded.insert(parent).second) continue;
            auto alts = detail::pairings(
                d, parent, [&](const AngleSet& c) { return idx.compatible(c); }, barriers);
            if (alts.empty()) throw validation("obstructed pullback of " + parent.str());
            if (alts.size() > 1)
                throw validation("ambiguous pullback of " + parent.str() + "; candidates:" + describe(alts));
            for (const auto& c : alts[0]) {
                if (present.insert(c).second) fresh.push_back(c);
                if (!expanded.count(c)) next.push_back(c);
            }
        }
        std::vector<AngleSet> all = classes;
        all.insert(all.end(), fresh.begin(), fresh.end());
        if (auto c = find_crossing(all))
            throw validation("obstructed pullback: " + all[c->first].str() + " links " + all[c->second].str());
        classes = std::move(all);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
    }
    return Lamination(d, classes);
}

Lamination visual_lamination(const Lamination& lam_h, const GeneratorSpec& gen, int depth) {
    if (lam_h.degree() != gen.degree) throw precondition("degree mismatch");
    return join(lam_h, minimal_from_generator(gen, depth));
}

}
