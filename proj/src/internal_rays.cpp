#include "lamlab/dynamics.hpp"
#include "lamlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lamlab {

// ---------------------------------------------------------------- fibers

std::string FiberAddress::str() const {
    std::string s = std::to_string(cycle_index);
    for (std::size_t i = 0; i < branches.size(); ++i) s += (i ? "." : ":") + std::to_string(branches[i]);
    return s;
}

FiberAddress FiberAddress::parse(const std::string& s) {
    FiberAddress v;
    auto bad = [&] { return parse_error("malformed fiber address '" + s + "'"); };
    std::size_t colon = s.find(':');
    std::string head = s.substr(0, colon);
    if (head.empty() || head.find_first_not_of("0123456789") != std::string::npos) throw bad();
    v.cycle_index = std::stoi(head);
    if (colon != std::string::npos) {
        if (s.back() == '.') throw bad();
        std::stringstream ss(s.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, '.')) {
            if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) throw bad();
            v.branches.push_back(std::stoi(tok));
        }
        if (v.branches.empty()) throw bad();
    }
    return v;
}

FiberAddress sigma(const FiberAddress& v, int p) {
    FiberAddress w = v;
    if (w.branches.empty())
        w.cycle_index = (w.cycle_index + 1) % p;
    else
        w.branches.pop_back();
    return w;
}

int delta(const FiberAddress& v) { return v.is_cycle() && v.cycle_index == 0 ? 2 : 1; }

std::pair<FiberAddress, Angle> g_tilde(const FiberAddress& v, const Angle& t, int p) {
    return {sigma(v, p), delta(v) == 2 ? tau(2, t) : t};
}

namespace {

// preimages of the fiber point u other than the cycle predecessor, ordered by (re, im)
std::vector<cplx> branch_preimages(const CycleData& cy, cplx u, std::optional<int> cycle_k) {
    auto pre = preimages(cy.a, u);
    std::vector<cplx> out;
    const double eps = 1e-8 * (1 + std::abs(cy.a.c));
    if (cycle_k) {
        cplx pred = cy.pts[(*cycle_k + cy.p - 1) % cy.p];
        for (auto z : pre)
            if (std::abs(z - pred) > eps) out.push_back(z);
    } else {
        out = pre;
    }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        if (std::abs(x.real() - y.real()) > 1e-12) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

}

cplx fiber_point(const CycleData& cy, const FiberAddress& v) {
    if (v.cycle_index < 0 || v.cycle_index >= cy.p) throw precondition("fiber cycle index out of range");
    cplx u = cy.pts[v.cycle_index];
    bool on_cycle = true;
    for (int b : v.branches) {
        auto pre = branch_preimages(cy, u, on_cycle ? std::optional<int>(v.cycle_index) : std::nullopt);
        if (b < 0 || b >= int(pre.size())) throw precondition("fiber branch tag out of range: " + v.str());
        u = pre[b];
        on_cycle = false;
    }
    return u;
}

// ---------------------------------------------------------------- turning sequences

std::optional<char> TurningSequence::at(std::size_t i) const {
    if (i < entries.size()) return entries[i];
    if (tail.empty()) return std::nullopt;
    return tail[(i - entries.size()) % tail.size()];
}

TurningSequence TurningSequence::shifted(std::size_t n) const {
    TurningSequence s;
    if (n <= entries.size()) {
        s.entries = entries.substr(n);
        s.tail = tail;
    } else if (!tail.empty()) {
        std::size_t r = (n - entries.size()) % tail.size();
        s.tail = tail.substr(r) + tail.substr(0, r);
    }
    return s;
}

std::string TurningSequence::str() const { return tail.empty() ? entries : entries + "(" + tail + ")"; }

TurningSequence TurningSequence::parse(const std::string& s) {
    TurningSequence t;
    auto bad = [&] { return parse_error("malformed turning sequence '" + s + "'"); };
    std::size_t open = s.find('(');
    t.entries = s.substr(0, open);
    if (open != std::string::npos) {
        if (s.back() != ')' || s.size() < open + 3) throw bad();
        t.tail = s.substr(open + 1, s.size() - open - 2);
    }
    for (char ch : t.entries + t.tail)
        if (ch != 'L' && ch != 'R') throw bad();
    return t;
}

// ---------------------------------------------------------------- critical data

CriticalData critical_data(const CycleData& cy) {
    CriticalData cd;
    const CubicParam& a = cy.a;
    TypeInfo ti = classify(a, 64, 192);
    if (ti.type != MilnorType::A && ti.type != MilnorType::B) return cd;  // C and D are not modelled
    if (ti.period != cy.p) throw precondition("cycle period disagrees with the detected period");
    const int k = ti.cycle_index;
    cplx w = iterate(a, -a.c, (cy.p - k) % cy.p);
    auto ph = bottcher_internal(cy, w - a.c);
    if (!ph) throw numerical("need Bottcher extension: -c lies outside the principal domain");
    cd.present = true;
    cd.x.cycle_index = k;
    cd.t_a = std::arg(*ph) / (2 * M_PI);
    if (cd.t_a < 0) cd.t_a += 1;
    cd.r_a = std::abs(*ph);
    const int k1 = (k + 1) % cy.p;
    auto pre = branch_preimages(cy, cy.pts[k1], k1);
    // the co-critical preimage of c_{k+1}: -2c for type A, nearest to -c otherwise
    std::size_t best = 0;
    cplx want = k == 0 ? -2.0 * a.c : -a.c;
    for (std::size_t i = 1; i < pre.size(); ++i)
        if (std::abs(pre[i] - want) < std::abs(pre[best] - want)) best = i;
    cd.y.cycle_index = k1;
    cd.y.branches = {int(best)};
    if (k == 0) {
        cd.t_a2 = std::fmod(2 * cd.t_a, 1.0);
        cd.r_a2 = cd.r_a * cd.r_a;
    } else {
        cd.t_a2 = cd.t_a;
        cd.r_a2 = cd.r_a;
    }
    return cd;
}

// ---------------------------------------------------------------- tracer

namespace {

struct Stage {
    FiberAddress v;
    Angle t;
    double e;  // lambda_j = e * lambda
};

// value on stage j: absolute when off the cycle, recentred at cycle point k otherwise
struct ChainValue {
    bool cyc;
    int k;
    cplx val;
    cplx abs(const CycleData& cy) const { return cyc ? cy.pts[k] + val : val; }
};

// distance from z to the nearer other root of f(z') = f(z); stable for small h near c
double sibling_sep(const CycleData& cy, const ChainValue& x) {
    const cplx c2 = cy.a.c * cy.a.c;
    cplx h = x.val, B, C;
    if (x.cyc) {
        // offsets h' from c_k: h'^2 + (3c_k + h)h' + 3(c_k^2 - c^2) + 3c_k h + h^2 = 0
        cplx ck = cy.pts[x.k];
        B = 3.0 * ck + h;
        C = 3.0 * (ck * ck - c2) + 3.0 * ck * h + h * h;
    } else {
        B = h;
        C = h * h - 3.0 * c2;
    }
    cplx sq = std::sqrt(B * B - 4.0 * C);
    cplx q1 = (-B - sq) / 2.0, q2 = (-B + sq) / 2.0;
    cplx q = std::abs(q1) >= std::abs(q2) ? q1 : q2;
    cplx r = q == 0.0 ? cplx(0.0) : C / q;
    return std::min(std::abs(q - h), std::abs(r - h));
}

class Tracer {
public:
    using Trail = std::vector<ChainValue>;  // levels 0..m, level m at c_0 inside the disk

    Tracer(const CycleData& cy, const CriticalData& crit, const FiberAddress& v, const Angle& t)
        : cy_(cy), crit_(crit) {
        if (v.cycle_index < 0 || v.cycle_index >= cy.p) throw precondition("fiber cycle index out of range");
        stages_.push_back({v, t, 1.0});
        log_rho_ = std::log(cy.rho);
    }

    const Stage& stage(std::size_t j) {
        while (stages_.size() <= j) {
            const Stage& s = stages_.back();
            auto [v, t] = g_tilde(s.v, s.t, cy_.p);
            stages_.push_back({v, t, s.e * delta(s.v)});
        }
        return stages_[j];
    }

    // number of steps until the model point is at c_0 inside the Bottcher disk
    int steps_for(double lam) {
        for (std::size_t j = 0;; ++j) {
            const Stage& s = stage(j);
            if (s.v.is_cycle() && s.v.cycle_index == 0 && s.e * lam <= log_rho_) return int(j);
            if (j > 100000) throw numerical("internal ray: model orbit does not return to the critical fiber");
        }
    }

    cplx absolute(const ChainValue& x) const { return x.abs(cy_); }

    // representation of the absolute point z on stage j
    ChainValue at_stage(std::size_t j, cplx z) {
        const Stage& s = stage(j);
        if (s.v.is_cycle()) return {true, s.v.cycle_index, z - cy_.pts[s.v.cycle_index]};
        return {false, 0, z};
    }

    ChainValue forward(const ChainValue& x, std::size_t j) {
        if (x.cyc) return {true, (x.k + 1) % cy_.p, recentred(cy_, x.k, x.val)};
        return at_stage(j + 1, evaluate(cy_.a, x.val));
    }

    // the point on stage j mapping to next, by damped Newton from guess
    std::optional<ChainValue> pull(std::size_t, const ChainValue& next, const ChainValue& guess) {
        ChainValue x = guess;
        auto resid = [&](cplx v, cplx* d) -> cplx {
            if (x.cyc) {
                *d = 1.0;
                return recentred(cy_, x.k, v, d) - next.val;
            }
            *d = derivative(cy_.a, v);
            cplx fz = evaluate(cy_.a, v);
            return next.cyc ? (fz - cy_.pts[next.k]) - next.val : fz - next.val;
        };
        cplx d;
        cplx r = resid(x.val, &d);
        for (int it = 0; it < 100; ++it) {
            if (d == 0.0) return std::nullopt;
            cplx st = r / d;
            double damp = 1.0;
            cplx vn, rn, dn;
            for (;;) {
                vn = x.val - damp * st;
                rn = resid(vn, &dn);
                if (std::abs(rn) < std::abs(r) || damp < 1e-6) break;
                damp *= 0.5;
            }
            if (!(std::abs(rn) < std::abs(r))) break;
            bool done = std::abs(vn - x.val) <= 1e-16 * (std::abs(vn) + (x.cyc ? 1e-300 : 1.0));
            x.val = vn;
            r = rn;
            d = dn;
            if (done || r == 0.0) break;
        }
        double scale = x.cyc ? std::abs(next.val) + 1e-300 : 1 + std::abs(next.val);
        if (!(std::abs(r) <= 1e-9 * scale)) return std::nullopt;
        return x;
    }

    // recentred target at c_0
    cplx target(double lam, int m) {
        const Stage& s = stage(m);
        return bottcher_internal_inverse(cy_, std::polar(std::exp(s.e * lam), 2 * M_PI * s.t.to_double()));
    }

    // guesses for lam from the previous trail, extended forward if the trail got longer
    Trail guesses(const Trail& prev, int m) {
        Trail g = prev;
        while (int(g.size()) <= m) g.push_back(forward(g.back(), g.size() - 1));
        g.resize(m + 1);
        return g;
    }

    // pull the target back to level 0 following the guesses; check continuity unless told not to
    // (levels listed in `free` skip the check)
    std::optional<Trail> solve(double lam, const Trail& prev, std::optional<std::size_t> free_level = std::nullopt,
                               std::optional<ChainValue> free_guess = std::nullopt) {
        const int m = steps_for(lam);
        Trail g = guesses(prev, m);
        Trail x(m + 1);
        x[m] = {true, 0, target(lam, m)};
        for (int j = m - 1; j >= 0; --j) {
            ChainValue gj = (free_level && std::size_t(j) == *free_level && free_guess) ? *free_guess : g[j];
            auto r = pull(j, x[j + 1], gj);
            if (!r) return std::nullopt;
            bool check = !(free_level && std::size_t(j) == *free_level);
            if (check && std::abs(r->val - gj.val) >= 0.5 * sibling_sep(cy_, *r)) return std::nullopt;
            x[j] = *r;
        }
        return x;
    }

    // first trail: fiber points (origin for recentred stages) as guesses
    Trail seed(double lam) {
        const int m = steps_for(lam);
        Trail g(m + 1);
        for (int j = 0; j <= m; ++j) {
            const Stage& s = stage(j);
            g[j] = s.v.is_cycle() ? ChainValue{true, s.v.cycle_index, 0.0} : ChainValue{false, 0, fiber_point(cy_, s.v)};
        }
        // tiny offsets so the Newton steps at non-critical stages are well defined
        auto t = solve_unchecked(lam, g);
        if (!t) throw numerical("internal ray: seed did not converge");
        return *t;
    }

    std::optional<Trail> solve_unchecked(double lam, const Trail& g) {
        const int m = steps_for(lam);
        Trail x(m + 1);
        x[m] = {true, 0, target(lam, m)};
        for (int j = m - 1; j >= 0; --j) {
            ChainValue gj = g[j];
            if (gj.cyc && gj.val == 0.0) {
                // linearised inverse of a non-critical cycle stage
                cplx d = 1.0;
                recentred(cy_, gj.k, 0.0, &d);
                if (d != 0.0) gj.val = x[j + 1].val / d;
            }
            auto r = pull(j, x[j + 1], gj);
            if (!r) return std::nullopt;
            x[j] = *r;
        }
        return x;
    }

    // first lambda* in (lo, hi] where the model orbit hits -c, with its stage
    std::optional<std::pair<double, int>> collision(double lo, double hi) {
        if (!crit_.present) return std::nullopt;
        int m = steps_for(hi);
        std::optional<std::pair<double, int>> best;
        for (int j = 0; j < m; ++j) {
            const Stage& s = stage(j);
            double tj = s.t.to_double();
            auto hit = [&](const FiberAddress& f, double ta, double ra) {
                if (!(s.v == f)) return;
                double dt = std::abs(tj - ta);
                dt = std::min(dt, 1 - dt);
                if (dt > 1e-7) return;
                double ls = std::log(ra) / s.e;
                if (ls > lo && ls <= hi && (!best || ls < best->first)) best = {{ls, j}};
            };
            hit(crit_.x, crit_.t_a, crit_.r_a);
            hit(crit_.y, crit_.t_a2, crit_.r_a2);
        }
        return best;
    }

    // distance from -c of the stage-j point at the collision potential: the root of f(z) = y
    // near -c satisfies (z + c)^2 (z - 2c) = y - f(-c)
    double collision_residual(const ChainValue& next) {
        cplx y = absolute(next);
        cplx gap = y - evaluate(cy_.a, -cy_.a.c);
        return std::sqrt(std::abs(gap) / std::abs(3.0 * cy_.a.c));
    }

    // pull -c (on stage j) back to level 0 along the trail
    std::optional<Trail> pull_critical(const Trail& tb, int j) {
        Trail x(tb);
        x[j] = at_stage(j, -cy_.a.c);
        for (int i = j - 1; i >= 0; --i) {
            auto r = pull(i, x[i + 1], tb[i]);
            if (!r) return std::nullopt;
            x[i] = *r;
        }
        return x;
    }

private:
    const CycleData& cy_;
    const CriticalData& crit_;
    std::vector<Stage> stages_;
    double log_rho_;
};

}

InternalRay trace_internal_ray(const CycleData& cy, const CriticalData& crit, const FiberAddress& v, const Angle& t,
                               const TurningSequence& turning, double s_max, const InternalOptions& opt) {
    if (!(s_max > 0 && s_max < 1)) throw precondition("s_max must lie in (0,1)");
    if (opt.samples_per_doubling < 1) throw precondition("samples per doubling must be >= 1");
    GenericCheck gc = generic_check(cy.a, cy.p);
    if (!gc.ok) throw precondition("non-generic parameter: " + gc.reason);
    InternalRay ray;
    ray.v = v;
    ray.t = t;
    ray.turning = turning;
    ray.samples_per_doubling = opt.samples_per_doubling;
    Tracer tr(cy, crit, v, t);
    const double lam_max = std::log(s_max);
    if (lam_max <= std::log(cy.rho)) throw precondition("s_max below the Bottcher disk radius");
    const int S = opt.samples_per_doubling;
    // grid lam_max * 2^(i/S), i = N..0, starting inside the Bottcher disk
    const int N = int(std::ceil(S * std::log2(std::log(cy.rho) / lam_max)));

    double lam = lam_max * std::exp2(double(N) / S);
    Tracer::Trail trail = tr.seed(lam);
    ray.points.push_back({std::exp(lam), tr.absolute(trail[0])});
    std::size_t turns = 0;

    // advance from lam to lam_to by continuation with step halving
    auto advance = [&](double lam_to) -> bool {
        double cur = lam, dl = lam_to - lam;
        while (cur < lam_to) {
            double nx = std::min(lam_to, cur + dl);
            auto r = tr.solve(nx, trail);
            if (r) {
                trail = std::move(*r);
                cur = nx;
                dl *= 2;
            } else {
                dl *= 0.5;
                if (dl < 1e-13 * std::abs(cur)) return false;
            }
        }
        lam = cur;
        return true;
    };

    for (int i = N - 1; i >= 0; --i) {
        double nxt = i == 0 ? lam_max : lam_max * std::exp2(double(i) / S);
        if (nxt <= lam) continue;
        while (auto col = tr.collision(lam, nxt)) {
            auto [ls, step] = *col;
            double eps = opt.collision_offset;
            bool jumped = false;
            for (int attempt = 0; attempt < 6 && !jumped; ++attempt, eps *= 0.1) {
                double lb = ls * (1 + eps), la = ls * (1 - eps);
                if (lb > lam && !advance(lb)) throw numerical("branch ambiguity: continuation failed near a collision");
                Tracer::Trail tb = trail;
                // the ray at the collision potential itself, for the residual at -c
                double resid = 0;
                if (auto ts = tr.solve(ls, tb, std::size_t(step), tb[step])) resid = tr.collision_residual((*ts)[step + 1]);
                auto tc = tr.pull_critical(tb, step);
                if (!tc) throw numerical("branch ambiguity: pre-critical point not found");
                cplx zb = tr.absolute(tb[0]), omega = tr.absolute((*tc)[0]);
                ray.collision_residual = std::max(ray.collision_residual, resid);
                auto br = turning.at(turns);
                if (!br) {
                    ray.points.push_back({std::exp(lam), zb});
                    ray.points.push_back({std::exp(ls), omega});
                    ray.turning_points.push_back({std::exp(ls), omega, step, '?'});
                    ray.status = RayStatus::Obstructed;
                    ray.landing = omega;
                    return ray;
                }
                // turn at the critical level; inverse branches below it are conformal
                const cplx mc = -cy.a.c;
                cplx zs = tr.absolute(tb[step]);
                cplx dir = (mc - zs) / std::abs(mc - zs);
                cplx out = (*br == 'L' ? cplx(0, 1) : cplx(0, -1)) * dir;
                ChainValue g = tr.at_stage(step, mc + out * std::abs(mc - zs));
                Tracer::Trail base = *tc;
                auto ra = tr.solve(la, base, std::size_t(step), g);
                if (!ra) continue;
                cplx rel = (tr.absolute((*ra)[step]) - mc) / out;
                if (std::abs(std::arg(rel)) > M_PI / 4) continue;
                ray.points.push_back({std::exp(lam), zb});
                ray.points.push_back({std::exp(ls), omega});
                ray.turning_points.push_back({std::exp(ls), omega, step, *br});
                trail = std::move(*ra);
                lam = la;
                ++turns;
                jumped = true;
            }
            if (!jumped) throw numerical("branch ambiguity: no consistent turning branch");
        }
        if (!advance(nxt)) throw numerical("branch ambiguity: continuation stalled");
        ray.points.push_back({std::exp(lam), tr.absolute(trail[0])});
    }
    // drop duplicates in potential produced around collisions
    std::vector<RayPoint> clean;
    for (auto& p : ray.points)
        if (clean.empty() || p.potential > clean.back().potential) clean.push_back(p);
    ray.points = std::move(clean);
    double err = 0;
    auto land = internal_landing(ray, opt.tol.landing, &err);
    ray.landing_error = err;
    if (land) {
        ray.status = RayStatus::Landed;
        ray.landing = *land;
    } else {
        ray.status = RayStatus::EscapedBudget;
        ray.landing = ray.points.back().z;
    }
    return ray;
}

InternalRay trace_internal_ray(const CubicParam& a, int p, const FiberAddress& v, const Angle& t,
                               const TurningSequence& turning, double s_max, const InternalOptions& opt) {
    CycleData cy = make_cycle(a, p);
    if (cy.residual > 1e-9 * (1 + std::abs(a.c))) throw precondition("c is not numerically periodic");
    CriticalData cd = critical_data(cy);
    return trace_internal_ray(cy, cd, v, t, turning, s_max, opt);
}

std::optional<cplx> internal_landing(const InternalRay& ray, double tol, double* err) {
    if (ray.status == RayStatus::Obstructed) return std::nullopt;
    // points whose log-potentials halve, counted from the outermost
    std::vector<cplx> zs;
    const std::size_t n = ray.points.size();
    if (n == 0) return std::nullopt;
    double lam = std::log(ray.points.back().potential);
    std::vector<cplx> rev;
    for (std::size_t i = n; i-- > 0;) {
        double li = std::log(ray.points[i].potential);
        if (std::abs(li - lam) <= 1e-9 * std::abs(lam)) {
            rev.push_back(ray.points[i].z);
            lam *= 2;
        } else if (li < lam) {
            break;  // grid gap (collision region): stop the tail here
        }
    }
    zs.assign(rev.rbegin(), rev.rend());
    return detail::tail_limit(zs, tol, err);
}

cplx internal_ray_point(const CycleData& cy, const InternalRay& ray, double s) {
    for (auto& p : ray.points)
        if (std::abs(std::log(p.potential) - std::log(s)) <= 1e-12 * std::abs(std::log(s))) return p.z;
    (void)cy;  // only the traced grid is available
    throw precondition("potential not on the traced grid");
}

}
