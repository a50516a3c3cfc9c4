#include "lamlab/dynamics.hpp"
#include "lamlab/error.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <map>
#include <numeric>

namespace lamlab {

std::vector<std::vector<std::size_t>> cluster_points(const std::vector<cplx>& pts, double tol) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    if (tol > 0) {
        std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
        auto key = [&](cplx z) {
            return std::make_pair((long long)std::floor(z.real() / tol), (long long)std::floor(z.imag() / tol));
        };
        for (std::size_t i = 0; i < n; ++i) grid[key(pts[i])].push_back(i);
        for (std::size_t i = 0; i < n; ++i) {
            auto [kx, ky] = key(pts[i]);
            for (long long dx = -1; dx <= 1; ++dx)
                for (long long dy = -1; dy <= 1; ++dy) {
                    auto it = grid.find({kx + dx, ky + dy});
                    if (it == grid.end()) continue;
                    for (std::size_t j : it->second)
                        if (j > i && std::abs(pts[i] - pts[j]) < tol) parent[root(i)] = root(j);
                }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[root(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [r, g] : groups) out.push_back(g);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

Lamination lamination_from_clusters(const std::vector<Angle>& angles, const std::vector<std::vector<std::size_t>>& cl) {
    std::vector<AngleSet> classes;
    for (auto& g : cl)
        if (g.size() > 1) {
            std::vector<Angle> m;
            for (auto i : g) m.push_back(angles[i]);
            classes.emplace_back(m);
        }
    return Lamination(3, classes);
}

}

EmpiricalLamination empirical_rational_lamination_report(const CubicParam& a, int max_den, double tol,
                                                         const RayOptions& opt) {
    if (max_den < 1) throw precondition("max_den must be >= 1");
    if (!connected_julia(a)) throw precondition("Julia set is not connected");
    auto angles = angles_up_to(max_den);
    EmpiricalLamination out;
    out.rays.resize(angles.size());
    tbb::parallel_for(std::size_t(0), angles.size(), [&](std::size_t i) { out.rays[i] = trace_and_land(a, angles[i], opt); });
    std::vector<cplx> pts;
    std::string bad;
    int nbad = 0;
    for (auto& r : out.rays) {
        if (r.status != RayStatus::Landed) {
            if (nbad++ < 8) bad += " " + r.theta.str() + "(" + to_string(r.status) + ")";
        }
        pts.push_back(r.landing);
    }
    if (nbad) throw numerical(std::to_string(nbad) + " rays did not land:" + bad);
    out.lam = lamination_from_clusters(angles, cluster_points(pts, tol));
    out.tol_stable = lamination_from_clusters(angles, cluster_points(pts, tol / 2)) == out.lam;
    out.axioms = check_axioms(out.lam);
    return out;
}

Lamination empirical_rational_lamination(const CubicParam& a, int max_den, double tol, const RayOptions& opt) {
    auto rep = empirical_rational_lamination_report(a, max_den, tol, opt);
    if (!rep.axioms.ok()) throw validation("empirical lamination violates the axioms: " + rep.axioms.summary());
    return rep.lam;
}

// ---------------------------------------------------------------- characteristic angles

namespace {

// reduced fractions with den <= max_den within w of x on the circle
std::vector<Angle> rationals_near(double x, double w, int max_den) {
    std::vector<Angle> out;
    for (long long q = 1; q <= max_den; ++q) {
        long long lo = (long long)std::ceil((x - w) * q), hi = (long long)std::floor((x + w) * q);
        for (long long k = lo; k <= hi; ++k)
            if (std::gcd(((k % q) + q) % q, q) == 1 || q == 1) out.emplace_back(((k % q) + q) % q, q);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Identified {
    Angle angle;
    double numeric;
};

Identified identify(const CubicParam& a, const InternalRay& ray, int max_den, const RayOptions& opt) {
    const cplx zeta = ray.landing;
    std::string tried;
    for (double delta : {1e-3, 1e-4, 1e-5}) {
        // where the internal ray crosses the probe circle
        cplx inward = ray.points.front().z - zeta;
        for (auto& p : ray.points)
            if (std::abs(p.z - zeta) < delta) { inward = p.z - zeta; break; }
        double phi0 = std::arg(inward);
        std::optional<double> th;
        for (int k = 1; k < 2048 && !th; ++k) {
            cplx z = zeta + std::polar(delta, phi0 + 2 * M_PI * k / 2048);
            if (green_external(a, z, 4000) > 0) th = external_angle_of(a, z, opt.steps_per_level);
        }
        if (!th) continue;
        for (double w = 1e-6; w <= 1.01e-3; w *= 10) {
            auto cand = rationals_near(*th, w, max_den);
            if (cand.empty()) continue;
            std::vector<ExternalRay> rays(cand.size());
            tbb::parallel_for(std::size_t(0), cand.size(), [&](std::size_t i) { rays[i] = trace_and_land(a, cand[i], opt); });
            std::vector<Angle> ok;
            for (std::size_t i = 0; i < cand.size(); ++i)
                if (rays[i].status == RayStatus::Landed && std::abs(rays[i].landing - zeta) < 1e-6) ok.push_back(cand[i]);
            for (auto& c : cand) tried += " " + c.str();
            if (ok.empty()) continue;
            ExternalClass ec = external_class_of(a, zeta, AngleSet(ok), 1e-6, inward, opt);
            return {ec.preferred, *th};
        }
    }
    throw numerical("rational identification failed; candidates tried:" + (tried.empty() ? std::string(" none") : tried));
}

}

CharacteristicAngles characteristic_angles(const CubicParam& a, int p, const Angle& t0, int max_den,
                                           const RayOptions& opt) {
    CycleData cy = make_cycle(a, p);
    CriticalData cd = critical_data(cy);
    if (!cd.present) throw precondition("free critical point is not in an immediate basin");
    double dt = std::abs(cd.t_a - t0.to_double());
    dt = std::min(dt, 1 - dt);
    if (dt > 1e-6) throw precondition("internal angle of -c is " + std::to_string(cd.t_a) + ", not t0");
    CharacteristicAngles out;
    InternalOptions io;
    io.tol = opt.tol;
    const double s_max = 1 - 1e-12;
    out.ray_left = trace_internal_ray(cy, cd, cd.x, t0, TurningSequence::parse("(L)"), s_max, io);
    out.ray_right = trace_internal_ray(cy, cd, cd.x, t0, TurningSequence::parse("(R)"), s_max, io);
    for (auto* r : {&out.ray_left, &out.ray_right})
        if (r->status != RayStatus::Landed) throw numerical("turning internal ray did not land");
    out.landing_left = out.ray_left.landing;
    out.landing_right = out.ray_right.landing;
    auto L = identify(a, out.ray_left, max_den, opt);
    auto R = identify(a, out.ray_right, max_den, opt);
    out.left = L.angle;
    out.right = R.angle;
    out.numeric_left = L.numeric;
    out.numeric_right = R.numeric;
    return out;
}

}
