#include "lamlab/parameter.hpp"
#include "lamlab/error.hpp"

#include <json.hpp>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace lamlab {

using nlohmann::json;

// ---------------------------------------------------------------- serialization

namespace {

json cj(cplx z) { return json::array({z.real(), z.imag()}); }
cplx jc(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
json pj(const CubicParam& a) { return {{"c", cj(a.c)}, {"v", cj(a.v)}}; }
CubicParam jp(const json& j) { return {jc(j.at("c")), jc(j.at("v"))}; }

}

std::string BoundaryEstimate::to_json() const {
    json j;
    j["p"] = p;
    j["t0"] = t0.str();
    json path_j = json::array();
    for (auto& pt : path) path_j.push_back(json::array({pt.r, cj(pt.a.c), cj(pt.a.v)}));
    j["path"] = path_j;
    j["status"] = status == PathStatus::Complete ? "complete" : "stalled";
    if (!message.empty()) j["message"] = message;
    j["a0"] = has_a0 ? pj(a0) : json(nullptr);
    j["extrapolation_gap"] = extrapolation_gap;
    if (a0_refined) {
        j["a0_refined"] = pj(*a0_refined);
        j["boundary_kind"] = boundary_kind;
        j["refine_residual"] = refine_residual;
    }
    j["combinatorics"] = to_string(combinatorics);
    j["predicted"] = predicted ? json::parse(predicted->to_json()) : json(nullptr);
    return j.dump();
}

BoundaryEstimate BoundaryEstimate::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw parse_error(std::string("boundary estimate: ") + e.what());
    }
    BoundaryEstimate b;
    try {
        b.p = j.at("p").get<int>();
        b.t0 = Angle::parse(j.at("t0").get<std::string>());
        for (auto& e : j.at("path")) b.path.push_back({e.at(0).get<double>(), {jc(e.at(1)), jc(e.at(2))}, 0, 0});
        if (j.contains("status")) b.status = j["status"] == "stalled" ? PathStatus::Stalled : PathStatus::Complete;
        if (j.contains("message")) b.message = j["message"].get<std::string>();
        if (!j.at("a0").is_null()) {
            b.has_a0 = true;
            b.a0 = jp(j["a0"]);
        }
        if (j.contains("extrapolation_gap")) b.extrapolation_gap = j["extrapolation_gap"].get<double>();
        if (j.contains("a0_refined")) {
            b.a0_refined = jp(j["a0_refined"]);
            b.boundary_kind = j.value("boundary_kind", "");
            b.refine_residual = j.value("refine_residual", 0.0);
        }
        b.combinatorics = j.at("combinatorics") == "periodic" ? Combinatorics::Periodic : Combinatorics::NonPeriodic;
        if (j.contains("predicted") && !j["predicted"].is_null()) b.predicted = Lamination::from_json(j["predicted"].dump());
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw parse_error(std::string("boundary estimate: ") + e.what());
    }
    return b;
}

// ---------------------------------------------------------------- prediction

Prediction predict_boundary_lamination(const ComponentRef& ref, const BoundaryEstimate& est, int depth, int max_den,
                                       const RayOptions& opt) {
    if (depth < 0) throw precondition("depth must be >= 0");
    if (max_den < 1) throw precondition("max_den must be >= 1");
    if (est.path.empty()) throw precondition("boundary estimate has no path");
    Prediction pr;
    PathPoint pt = ray_parameter_at(ref, est, pr.r_chars);
    pr.chars = characteristic_angles(pt.a, est.p, est.t0, max_den, opt);
    pr.generator = GeneratorSpec::make(AngleSet({pr.chars.left, pr.chars.right}));
    auto rep = empirical_rational_lamination_report(ref.witness.a, max_den, opt.tol.cluster, opt);
    if (!rep.axioms.ok()) throw validation("interior lamination violates the axioms: " + rep.axioms.summary());
    pr.lam_h = rep.lam;
    pr.predicted = visual_lamination(pr.lam_h, pr.generator, depth).restricted(max_den);
    return pr;
}

// ---------------------------------------------------------------- observation

namespace {

// Neville: polynomial through (x_i, y_i) evaluated at x0
cplx neville(std::vector<cplx> x, std::vector<cplx> y, cplx x0) {
    const std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            y[i] = ((x0 - x[i + m]) * y[i] + (x[i] - x0) * y[i + 1]) / (x[i] - x[i + m]);
    return y[0];
}

}

Observation observe_boundary_lamination(const ComponentRef& ref, const BoundaryEstimate& est, int max_den, double tol,
                                        const RayOptions& opt) {
    if (!est.has_a0 && !est.a0_refined) throw precondition("boundary estimate has no a0");
    const CubicParam a0 = est.a0_refined ? *est.a0_refined : est.a0;
    Observation ob;
    std::vector<CubicParam>& nodes = ob.nodes;
    for (int j = 0; j < 6; ++j) {
        double r = 0.05 * std::ldexp(1.0, -j);
        ob.node_r.push_back(r);
        nodes.push_back(ray_parameter_at(ref, est, r).a);
    }
    ob.angles = angles_up_to(max_den);
    const auto& angles = ob.angles;
    const std::size_t n = angles.size(), J = nodes.size();
    auto& land = ob.landings;
    land.assign(J, std::vector<cplx>(n));
    for (std::size_t j = 0; j < J; ++j) {
        auto rep = empirical_rational_lamination_report(nodes[j], max_den, opt.tol.cluster, opt);
        for (std::size_t i = 0; i < n; ++i) land[j][i] = rep.rays[i].landing;
    }
    // candidate pairs: close at the node nearest the boundary
    const double radius = 0.25;
    std::map<std::pair<long long, long long>, std::vector<std::size_t>> grid;
    auto key = [&](cplx z) {
        return std::make_pair((long long)std::floor(z.real() / radius), (long long)std::floor(z.imag() / radius));
    };
    for (std::size_t i = 0; i < n; ++i) grid[key(land[J - 1][i])].push_back(i);
    std::vector<std::pair<std::size_t, std::size_t>> cand;
    for (std::size_t i = 0; i < n; ++i) {
        auto [kx, ky] = key(land[J - 1][i]);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find({kx + dx, ky + dy});
                if (it == grid.end()) continue;
                for (std::size_t k : it->second)
                    if (k > i && std::abs(land[J - 1][i] - land[J - 1][k]) < radius) cand.push_back({i, k});
            }
    }
    ob.pairs_tested = cand.size();
    std::vector<cplx> xs;
    for (auto& a : nodes) xs.push_back(a.c);
    std::vector<double> gap(cand.size());
    tbb::parallel_for(std::size_t(0), cand.size(), [&](std::size_t q) {
        auto [i, k] = cand[q];
        std::vector<cplx> ds(J);
        for (std::size_t j = 0; j < J; ++j) {
            cplx d = land[j][i] - land[j][k];
            ds[j] = d * d;
        }
        // the squared distance of two merging points is analytic in the parameter
        gap[q] = std::sqrt(std::abs(neville(xs, ds, a0.c)));
    });
    std::vector<std::pair<Angle, Angle>> pairs;
    ob.best_separated = 1e300;
    for (std::size_t q = 0; q < cand.size(); ++q) {
        if (gap[q] < tol) {
            pairs.push_back({angles[cand[q].first], angles[cand[q].second]});
            ob.worst_colanding = std::max(ob.worst_colanding, gap[q]);
        } else {
            ob.best_separated = std::min(ob.best_separated, gap[q]);
        }
    }
    ob.lam = closure(3, pairs);
    return ob;
}

// ---------------------------------------------------------------- comparison

std::string CompareReport::to_json() const {
    json j;
    auto sets = [](const std::vector<AngleSet>& v) {
        json a = json::array();
        for (auto& s : v) {
            json m = json::array();
            for (auto& x : s.members()) m.push_back(x.str());
            a.push_back(m);
        }
        return a;
    };
    j["angles"] = angles;
    j["agreeing"] = agreeing;
    j["agreement"] = agreement;
    j["only_predicted"] = sets(only_predicted);
    j["only_observed"] = sets(only_observed);
    return j.dump();
}

CompareReport compare_prediction(const Lamination& predicted, const Lamination& observed, int max_den) {
    if (predicted.degree() != observed.degree()) throw precondition("degree mismatch");
    Lamination P = predicted.restricted(max_den), O = observed.restricted(max_den);
    CompareReport rep;
    for (auto& c : P.classes())
        if (!O.find(c.members().front()) || O.classes()[*O.find(c.members().front())] != c) rep.only_predicted.push_back(c);
    for (auto& c : O.classes())
        if (!P.find(c.members().front()) || P.classes()[*P.find(c.members().front())] != c) rep.only_observed.push_back(c);
    for (auto& a : angles_up_to(max_den)) {
        ++rep.angles;
        if (P.class_of(a) == O.class_of(a)) ++rep.agreeing;
    }
    rep.agreement = rep.angles ? 100.0 * double(rep.agreeing) / double(rep.angles) : 100.0;
    return rep;
}

RigidityReport rigidity_probe(const Lamination& interior, const Lamination& predicted, int max_den) {
    RigidityReport r;
    r.min_new_den = 0;
    for (auto& c : predicted.classes()) {
        auto i = interior.find(c.members().front());
        if (i && interior.classes()[*i] == c) continue;
        ++r.new_classes;
        for (auto& a : c.members()) {
            int d = a.den().convert_to<int>();
            if (r.min_new_den == 0 || d < r.min_new_den) r.min_new_den = d;
        }
    }
    r.indistinguishable = interior.restricted(max_den) == predicted.restricted(max_den);
    r.verdict = r.indistinguishable ? "Q-indistinguishable at this bound" : "distinguished at this bound";
    return r;
}

}
