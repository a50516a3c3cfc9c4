// lamlab command-line driver.
#include "cache.hpp"
#include "config.hpp"

#include "lamlab/error.hpp"
#include "lamlab/parameter.hpp"
#include "lamlab/render.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lamlab;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- argument helpers

cplx parse_complex(const std::string& s) {
    auto bad = [&] { return parse_error("expected a complex number as re or re,im: '" + s + "'"); };
    try {
        std::size_t comma = s.find(',');
        std::size_t pos = 0;
        double re = std::stod(s.substr(0, comma), &pos);
        if (pos != s.substr(0, comma).size()) throw bad();
        double im = 0;
        if (comma != std::string::npos) {
            std::string t = s.substr(comma + 1);
            im = std::stod(t, &pos);
            if (pos != t.size()) throw bad();
        }
        return {re, im};
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw bad();
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::vector<std::pair<Angle, Angle>> parse_pairs(const std::string& s) {
    std::vector<std::pair<Angle, Angle>> out;
    for (auto& p : split(s, ',')) {
        auto ab = split(p, ':');
        if (ab.size() != 2) throw parse_error("pairs are written a:b, got '" + p + "'");
        out.emplace_back(Angle::parse(ab[0]), Angle::parse(ab[1]));
    }
    return out;
}

// "1/12,5/12;1/4,1/2"
std::vector<AngleSet> parse_classes(const std::string& s) {
    std::vector<AngleSet> out;
    for (auto& c : split(s, ';')) {
        std::vector<Angle> m;
        for (auto& a : split(c, ',')) m.push_back(Angle::parse(a));
        out.emplace_back(m);
    }
    return out;
}

AngleSet parse_set(const std::string& s) {
    std::vector<Angle> m;
    for (auto& a : split(s, ',')) m.push_back(Angle::parse(a));
    if (m.empty()) throw parse_error("empty angle set");
    return AngleSet(m);
}

std::string read_text(const std::string& path) {
    std::stringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) throw precondition("cannot read " + path);
    ss << f.rdbuf();
    return ss.str();
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }
json pj(const CubicParam& a) { return {{"c", cj(a.c)}, {"v", cj(a.v)}}; }
json sets_json(const std::vector<AngleSet>& v) {
    json a = json::array();
    for (auto& s : v) {
        json m = json::array();
        for (auto& x : s) m.push_back(x.str());
        a.push_back(m);
    }
    return a;
}

json axioms_json(const AxiomReport& r) {
    json j;
    const char* names[] = {"R1", "R2", "R3", "R4", "R5"};
    const AxiomResult* rs[] = {&r.r1, &r.r2, &r.r3, &r.r4, &r.r5};
    for (int i = 0; i < 5; ++i) {
        json e = {{"verdict", to_string(rs[i]->verdict)}};
        if (!rs[i]->witness.empty()) e["witness"] = sets_json(rs[i]->witness);
        if (!rs[i]->detail.empty()) e["detail"] = rs[i]->detail;
        j[names[i]] = e;
    }
    j["ok"] = r.ok();
    return j;
}

json ray_json(const ExternalRay& r, bool points) {
    json j = {{"theta", r.theta.str()},     {"status", to_string(r.status)},    {"landing", cj(r.landing)},
              {"landing_error", r.landing_error}, {"max_residual", r.max_residual}, {"levels", r.points.size()}};
    if (points) {
        json p = json::array();
        for (auto& q : r.points) p.push_back(json::array({q.potential, q.z.real(), q.z.imag()}));
        j["points"] = p;
    }
    return j;
}

json internal_json(const InternalRay& r, bool points) {
    json j = {{"fiber", r.v.str()},
              {"t", r.t.str()},
              {"turning", r.turning.str()},
              {"status", to_string(r.status)},
              {"landing", cj(r.landing)},
              {"landing_error", r.landing_error},
              {"collision_residual", r.collision_residual}};
    json tp = json::array();
    for (auto& t : r.turning_points)
        tp.push_back({{"potential", t.potential}, {"z", cj(t.z)}, {"step", t.step}, {"branch", std::string(1, t.branch)}});
    j["turning_points"] = tp;
    if (points) {
        json p = json::array();
        for (auto& q : r.points) p.push_back(json::array({q.potential, q.z.real(), q.z.imag()}));
        j["points"] = p;
    }
    return j;
}

// ---------------------------------------------------------------- shared state

struct Run {
    cli::Config cfg;
    std::string command;
    json args = json::object();
    std::string output;  // file, empty for stdout
    bool no_cache = false;

    RayOptions ray_options() const {
        RayOptions o;
        o.tol = cfg.tol;
        return o;
    }
    cli::Cache cache() const { return cli::Cache(cfg.cache_dir, !no_cache); }

    // canonical cache key: command, parameters, tolerances
    std::string key(const json& params) const {
        json k = {{"command", command}, {"params", params}, {"tol", cfg.to_json()["tol"]}, {"version", kVersion}};
        return k.dump();
    }

    void emit_text(const std::string& text) const {
        if (output.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream f(output, std::ios::binary);
        if (!f) throw precondition("cannot write " + output);
        f << text;
    }

    void emit(json result) const {
        result["provenance"] = {{"tool", "lamlab"}, {"version", kVersion}, {"command", command}, {"args", args},
                                {"config", cfg.to_json()}};
        emit_text(result.dump(2) + "\n");
    }
};

json lamination_json(const Lamination& l) { return json::parse(l.to_json()); }

Lamination read_lamination(const std::string& input, const std::string& classes, int degree) {
    if (!input.empty()) return Lamination::from_json(read_text(input));
    return Lamination(degree, parse_classes(classes));
}

struct ParamArgs {
    std::string c = "0.3", v;
    int p = 1;
    CubicParam param() const {
        cplx cc = parse_complex(c);
        return {cc, v.empty() ? cc : parse_complex(v)};
    }
};

void add_param(CLI::App* s, ParamArgs& a, bool with_p) {
    s->add_option("--c", a.c, "marked critical point (re or re,im)")->capture_default_str();
    s->add_option("--v", a.v, "critical value offset (re or re,im); defaults to c");
    if (with_p) s->add_option("--p", a.p, "period of c")->capture_default_str()->check(CLI::PositiveNumber);
}

// witness inside the component: p = 1 defaults to the family point c = 0.3
ComponentRef component(int p, const ParamArgs& w) {
    SliceParam s = solve_slice(p, w.param());
    return component_of(s);
}

}

int main(int argc, char** argv) {
    CLI::App app{"lamlab: invariant laminations and cubic dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.fallthrough();

    Run run;
    std::string config_file;
    std::optional<double> f_trace, f_cluster, f_landing, f_slice, f_cont;
    std::optional<int> f_budget;
    std::optional<std::string> f_cache;
    app.add_option("--config", config_file, "key = value configuration file");
    app.add_option("--tol-trace", f_trace, "pullback residual tolerance");
    app.add_option("--tol-cluster", f_cluster, "co-landing radius");
    app.add_option("--tol-landing", f_landing, "landing tail tolerance");
    app.add_option("--tol-slice", f_slice, "slice residual tolerance");
    app.add_option("--tol-continuation", f_cont, "parameter ray continuation tolerance");
    app.add_option("--iteration-budget", f_budget, "escape iteration budget");
    app.add_option("--cache-dir", f_cache, "cache directory (overrides LAMLAB_CACHE)");
    app.add_flag("--no-cache", run.no_cache, "neither read nor write the cache");
    app.add_option("-o,--output", run.output, "write the result here instead of stdout");

    // subcommand options
    int degree = 3;
    std::string input, classes, pairs, generator, lam_h_file, boundary_file, observed_file;
    std::optional<int> depth, max_den;
    ParamArgs pa, witness;
    std::string theta = "0/1", fiber = "0", t_int = "0/1", turning, t0 = "1/2";
    double target_potential = 1e-18, s_max = 1 - 1e-12, r_min = 1e-5, cluster_tol = -1, landing_tol = 1e-5;
    int steps = 8, size = 512, budget = 0;
    bool points = false, hull = false;
    double span = 3.0;
    std::string center = "0", palette = "classic", rays, internal_spec;

    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->callback([&run, name] { run.command = name; });
        return s;
    };
    auto* lam_check = sub("lam-check", "check the lamination axioms R1-R5");
    lam_check->add_option("--input", input, "lamination JSON file, - for stdin");
    lam_check->add_option("--classes", classes, "classes as a,b;c,d");
    lam_check->add_option("--degree", degree)->capture_default_str();

    auto* lam_close = sub("lam-close", "smallest equivalence relation containing the pairs");
    lam_close->add_option("--degree", degree)->capture_default_str();
    lam_close->add_option("--pairs", pairs, "pairs a:b,c:d")->required();

    auto* lam_min = sub("lam-minimal", "minimal relation generated by a characteristic class");
    lam_min->add_option("--generator", generator, "two angles a,b")->required();
    lam_min->add_option("--depth", depth, "pullback depth");
    lam_min->add_option("--degree", degree)->capture_default_str();

    auto* lam_vis = sub("lam-visual", "visual lamination: join of a component lamination and the minimal relation");
    lam_vis->add_option("--generator", generator, "two angles a,b")->required();
    lam_vis->add_option("--lam-h", lam_h_file, "component lamination JSON (default: trivial)");
    lam_vis->add_option("--depth", depth, "pullback depth");
    lam_vis->add_option("--degree", degree)->capture_default_str();

    auto* ray_ext = sub("ray-ext", "trace an external ray and estimate its landing point");
    add_param(ray_ext, pa, false);
    ray_ext->add_option("--theta", theta, "external angle num/den")->capture_default_str();
    ray_ext->add_option("--target-potential", target_potential)->capture_default_str();
    ray_ext->add_option("--steps", steps, "substeps per level")->capture_default_str();
    ray_ext->add_flag("--points", points, "include the traced points");

    auto* ray_int = sub("ray-int", "trace a (turning) internal ray");
    add_param(ray_int, pa, true);
    ray_int->add_option("--fiber", fiber, "fiber address k or k:b1.b2")->capture_default_str();
    ray_int->add_option("--t", t_int, "internal angle num/den")->capture_default_str();
    ray_int->add_option("--turning", turning, "turning sequence such as L, LR, (L); empty for smooth");
    ray_int->add_option("--s-max", s_max)->capture_default_str();
    ray_int->add_flag("--points", points, "include the traced points");

    auto* rat_lam = sub("rat-lam", "empirical rational lamination from co-landing rays");
    add_param(rat_lam, pa, false);
    rat_lam->add_option("--max-den", max_den, "largest denominator");
    rat_lam->add_option("--tol", cluster_tol, "co-landing radius (default tol.cluster)");

    auto* slice = sub("slice-solve", "solve f^p(c) = c for v with c fixed");
    add_param(slice, pa, true);

    auto* pray = sub("param-ray", "parameter internal ray of the component through the witness");
    add_param(pray, witness, true);
    pray->add_option("--t0", t0, "internal angle num/den")->capture_default_str();
    pray->add_option("--r-min", r_min, "smallest co-radius 1 - |Phi|")->capture_default_str();
    pray->add_option("--steps", steps, "substeps per schedule interval")->capture_default_str();

    auto* bpred = sub("boundary-predict", "predict the lamination at the landing point of a parameter ray");
    add_param(bpred, witness, true);
    bpred->add_option("--t0", t0, "internal angle num/den")->capture_default_str();
    bpred->add_option("--depth", depth, "pullback depth");
    bpred->add_option("--max-den", max_den, "largest denominator");
    bpred->add_option("--r-min", r_min)->capture_default_str();

    auto* cmp = sub("compare", "compare a predicted boundary lamination with the observed one");
    cmp->add_option("--boundary", boundary_file, "output of boundary-predict")->required();
    cmp->add_option("--observed", observed_file, "observed lamination JSON (default: observe near a0)");
    cmp->add_option("--max-den", max_den, "largest denominator");
    cmp->add_option("--landing-tol", landing_tol, "co-landing tolerance at a0")->capture_default_str();

    auto* dchords = sub("draw-chords", "SVG chord diagram of a lamination");
    dchords->add_option("--input", input, "lamination JSON file, - for stdin");
    dchords->add_option("--classes", classes, "classes as a,b;c,d");
    dchords->add_option("--generator", generator, "color classes by distance to this class");
    dchords->add_option("--depth", depth, "draw the minimal relation of --generator at this depth");
    dchords->add_option("--size", size)->capture_default_str();
    dchords->add_flag("--hull", hull, "fill classes as polygons");
    dchords->add_option("--degree", degree)->capture_default_str();

    auto* djulia = sub("draw-julia", "PNG of the Julia set with ray overlays");
    add_param(djulia, pa, true);
    djulia->add_option("--size", size)->capture_default_str();
    djulia->add_option("--span", span)->capture_default_str();
    djulia->add_option("--center", center)->capture_default_str();
    djulia->add_option("--budget", budget, "escape budget (default budget.iteration)");
    djulia->add_option("--palette", palette)->check(CLI::IsMember({"classic", "gray"}))->capture_default_str();
    djulia->add_option("--rays", rays, "external angles to overlay, comma separated");
    djulia->add_option("--internal", internal_spec, "internal rays to overlay as fiber/t/turning;...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        // defaults < file < LAMLAB_CACHE < flags
        cli::Config& cfg = run.cfg;
        if (!config_file.empty()) cli::load_config_file(cfg, config_file);
        if (const char* env = std::getenv("LAMLAB_CACHE"); env && *env) {
            cfg.cache_dir = env;
            cfg.origin["cache.dir"] = "env";
        }
        auto flag = [&](const char* key, auto& opt) {
            if (opt) {
                std::ostringstream os;
                os.precision(17);
                os << *opt;
                cfg.set(key, os.str(), "flag");
            }
        };
        flag("tol.trace", f_trace);
        flag("tol.cluster", f_cluster);
        flag("tol.landing", f_landing);
        flag("tol.slice", f_slice);
        flag("tol.continuation", f_cont);
        flag("budget.iteration", f_budget);
        flag("budget.depth", depth);
        flag("budget.max_den", max_den);
        if (f_cache) cfg.set("cache.dir", *f_cache, "flag");
        cfg.validate();
        const std::string& cmd = run.command;

        if (cmd == "lam-check") {
            if (input.empty() && classes.empty()) throw precondition("lam-check needs --input or --classes");
            run.args = {{"input", input}, {"classes", classes}, {"degree", degree}};
            Lamination lam = read_lamination(input, classes, degree);
            AxiomReport rep = check_axioms(lam);
            run.emit({{"lamination", lamination_json(lam)}, {"axioms", axioms_json(rep)}});
            return rep.ok() ? 0 : 3;
        }
        if (cmd == "lam-close") {
            run.args = {{"degree", degree}, {"pairs", pairs}};
            Lamination lam = closure(degree, parse_pairs(pairs));
            json j = lamination_json(lam);
            run.emit(j);
            return 0;
        }
        if (cmd == "lam-minimal" || cmd == "lam-visual") {
            run.args = {{"generator", generator}, {"depth", cfg.depth}, {"degree", degree}};
            GeneratorSpec spec = GeneratorSpec::make(parse_set(generator), degree);
            Lamination lam = [&] {
                if (cmd == "lam-minimal") return minimal_from_generator(spec, cfg.depth);
                run.args["lam_h"] = lam_h_file;
                Lamination h = lam_h_file.empty() ? Lamination(degree) : Lamination::from_json(read_text(lam_h_file));
                return visual_lamination(h, spec, cfg.depth);
            }();
            AxiomReport rep = check_axioms(lam);
            json j = lamination_json(lam);
            j["axioms"] = axioms_json(rep);
            run.emit(j);
            return rep.ok() ? 0 : 3;
        }
        if (cmd == "ray-ext") {
            CubicParam a = pa.param();
            run.args = {{"a", pj(a)}, {"theta", theta}, {"target_potential", target_potential}, {"steps", steps}};
            RayOptions o = run.ray_options();
            o.target_potential = target_potential;
            o.steps_per_level = steps;
            ExternalRay r = trace_and_land(a, Angle::parse(theta), o);
            run.emit(ray_json(r, points));
            return r.status == RayStatus::Landed ? 0 : 2;
        }
        if (cmd == "ray-int") {
            CubicParam a = pa.param();
            run.args = {{"a", pj(a)}, {"p", pa.p}, {"fiber", fiber}, {"t", t_int}, {"turning", turning}, {"s_max", s_max}};
            InternalOptions io;
            io.tol = cfg.tol;
            InternalRay r = trace_internal_ray(a, pa.p, FiberAddress::parse(fiber), Angle::parse(t_int),
                                               TurningSequence::parse(turning), s_max, io);
            run.emit(internal_json(r, points));
            return r.status == RayStatus::Landed ? 0 : 2;
        }
        if (cmd == "rat-lam") {
            CubicParam a = pa.param();
            double tol = cluster_tol > 0 ? cluster_tol : cfg.tol.cluster;
            run.args = {{"a", pj(a)}, {"max_den", cfg.max_den}, {"tol", tol}};
            std::string key = run.key(run.args);
            auto cache = run.cache();
            json res;
            if (auto hit = cache.get(key)) {
                res = json::parse(*hit);
            } else {
                auto rep = empirical_rational_lamination_report(a, cfg.max_den, tol, run.ray_options());
                res = lamination_json(rep.lam);
                res["tol_stable"] = rep.tol_stable;
                res["axioms"] = axioms_json(rep.axioms);
                res["rays"] = rep.rays.size();
                double worst = 0;
                for (auto& r : rep.rays) worst = std::max(worst, r.landing_error);
                res["worst_landing_error"] = worst;
                cache.put(key, res.dump());
            }
            run.emit(res);
            return res["axioms"]["ok"].get<bool>() ? 0 : 3;
        }
        if (cmd == "slice-solve") {
            run.args = {{"p", pa.p}, {"seed", pj(pa.param())}};
            SliceParam s = solve_slice(pa.p, pa.param(), cfg.tol.slice);
            TypeInfo ti = classify(s.a);
            run.emit({{"p", s.p},
                      {"a", pj(s.a)},
                      {"residual", s.residual},
                      {"type", to_string(ti.type)},
                      {"ell", ti.ell},
                      {"deg_d", ti.deg_d}});
            return 0;
        }
        if (cmd == "param-ray" || cmd == "boundary-predict") {
            const bool predict = cmd == "boundary-predict";
            run.args = {{"p", witness.p}, {"witness", pj(witness.param())}, {"t0", t0}, {"r_min", r_min}};
            if (predict) {
                run.args["depth"] = cfg.depth;
                run.args["max_den"] = cfg.max_den;
            } else {
                run.args["steps"] = steps;
            }
            std::string key = run.key(run.args);
            auto cache = run.cache();
            json res;
            if (auto hit = cache.get(key)) {
                res = json::parse(*hit);
            } else {
                ComponentRef ref = component(witness.p, witness);
                ParamRayOptions po;
                po.tol = cfg.tol;
                BoundaryEstimate est = trace_parameter_ray(ref, Angle::parse(t0), r_min, steps, po);
                if (est.status == PathStatus::Stalled && !predict) {
                    res = json::parse(est.to_json());
                } else {
                    if (est.status == PathStatus::Stalled) throw numerical("parameter ray: " + est.message);
                    std::string landing_error;
                    try {
                        boundary_landing(est);
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::Numerical) throw;
                        landing_error = e.what();
                    }
                    json extra;
                    if (predict) {
                        Prediction pr = predict_boundary_lamination(ref, est, cfg.depth, cfg.max_den, run.ray_options());
                        refine_boundary(ref, est, pr.chars.left);
                        est.predicted = pr.predicted;
                        extra["characteristic"] = {{"left", pr.chars.left.str()},
                                                   {"right", pr.chars.right.str()},
                                                   {"numeric_left", pr.chars.numeric_left},
                                                   {"numeric_right", pr.chars.numeric_right},
                                                   {"r", pr.r_chars}};
                        extra["lam_h"] = lamination_json(pr.lam_h);
                        extra["max_den"] = cfg.max_den;
                        extra["depth"] = cfg.depth;
                    }
                    // an unstable extrapolation is reported; the path itself stays valid
                    res = json::parse(est.to_json());
                    if (!landing_error.empty()) res["landing_error"] = landing_error;
                    for (auto& [k, v] : extra.items()) res[k] = v;
                    res["witness"] = pj(ref.witness.a);
                    res["component"] = {{"type", to_string(ref.type)}, {"ell", ref.ell}, {"deg_d", ref.deg_d}};
                }
                cache.put(key, res.dump());
            }
            run.emit(res);
            if (res.value("status", "complete") == "stalled") return 2;
            return 0;
        }
        if (cmd == "compare") {
            run.args = {{"boundary", boundary_file}, {"observed", observed_file}, {"max_den", cfg.max_den},
                        {"landing_tol", landing_tol}};
            json b = json::parse(read_text(boundary_file));
            BoundaryEstimate est = BoundaryEstimate::from_json(b.dump());
            if (!est.predicted) throw precondition("boundary file carries no prediction; run boundary-predict");
            const int md = max_den ? cfg.max_den : b.value("max_den", cfg.max_den);
            run.args["max_den"] = md;
            json res;
            Lamination observed(3);
            if (!observed_file.empty()) {
                observed = Lamination::from_json(read_text(observed_file));
            } else {
                if (!b.contains("witness")) throw precondition("boundary file has no witness");
                auto jc = [](const json& z) { return cplx{z.at(0).get<double>(), z.at(1).get<double>()}; };
                SliceParam w = solve_slice(est.p, {jc(b["witness"]["c"]), jc(b["witness"]["v"])});
                ComponentRef ref = component_of(w);
                std::string key = run.key({{"boundary", b.dump()}, {"max_den", md}, {"landing_tol", landing_tol}});
                auto cache = run.cache();
                if (auto hit = cache.get(key)) {
                    json o = json::parse(*hit);
                    observed = Lamination::from_json(o["lamination"].dump());
                    res["observation"] = o["stats"];
                } else {
                    Observation ob = observe_boundary_lamination(ref, est, md, landing_tol, run.ray_options());
                    observed = ob.lam;
                    json stats = {{"pairs_tested", ob.pairs_tested},
                                  {"worst_colanding", ob.worst_colanding},
                                  {"best_separated", ob.best_separated},
                                  {"node_r", ob.node_r}};
                    res["observation"] = stats;
                    cache.put(key, json({{"lamination", lamination_json(ob.lam)}, {"stats", stats}}).dump());
                }
            }
            CompareReport cr = compare_prediction(*est.predicted, observed, md);
            json rep = json::parse(cr.to_json());
            for (auto& [k, v] : rep.items()) res[k] = v;
            res["observed"] = lamination_json(observed.restricted(md));
            res["predicted"] = lamination_json(est.predicted->restricted(md));
            if (b.contains("lam_h")) {
                Lamination h = Lamination::from_json(b["lam_h"].dump());
                RigidityReport rr = rigidity_probe(h, *est.predicted, md);
                res["strict_containment"] = contains(*est.predicted, h) && *est.predicted != h.restricted(md);
                res["rigidity"] = {{"verdict", rr.verdict}, {"new_classes", rr.new_classes}, {"min_new_den", rr.min_new_den}};
            }
            run.emit(res);
            return 0;
        }
        if (cmd == "draw-chords") {
            run.args = {{"input", input}, {"classes", classes}, {"generator", generator}, {"size", size}, {"hull", hull}};
            ChordOptions co;
            co.size = size;
            co.hull = hull;
            Lamination lam(degree);
            if (!generator.empty()) co.generator = parse_set(generator);
            if (!input.empty() || !classes.empty()) {
                lam = read_lamination(input, classes, degree);
            } else if (co.generator) {
                lam = minimal_from_generator(GeneratorSpec::make(*co.generator, degree), cfg.depth);
            } else {
                throw precondition("draw-chords needs --input, --classes or --generator");
            }
            run.emit_text(chord_svg(lam, co));
            return 0;
        }
        if (cmd == "draw-julia") {
            if (run.output.empty()) throw precondition("draw-julia needs --output FILE.png");
            JuliaPlot plot;
            plot.a = pa.param();
            plot.width = plot.height = size;
            plot.span = span;
            plot.center = parse_complex(center);
            plot.budget = budget > 0 ? budget : cfg.iteration_budget;
            plot.palette = palette;
            plot.period = pa.p;
            if (std::abs(plot.a.c) < 1e-12) plot.period = 0;  // no marked super-attracting basin to shade
            RayOptions o = run.ray_options();
            Rgb colors[] = {{255, 60, 60}, {60, 255, 60}, {255, 160, 0}, {255, 0, 255}};
            int ci = 0;
            for (auto& th : split(rays, ',')) {
                ExternalRay r = trace_and_land(plot.a, Angle::parse(th), o);
                Overlay ov;
                for (auto& q : r.points) ov.points.push_back(q.z);
                ov.color = colors[ci++ % 4];
                plot.overlays.push_back(ov);
            }
            for (auto& spec : split(internal_spec, ';')) {
                auto parts = split(spec, '/');
                // fiber/num/den[/turning]
                if (parts.size() < 3) throw parse_error("internal ray overlay is fiber/num/den[/turning]");
                InternalRay r = trace_internal_ray(plot.a, pa.p, FiberAddress::parse(parts[0]),
                                                   Angle::parse(parts[1] + "/" + parts[2]),
                                                   TurningSequence::parse(parts.size() > 3 ? parts[3] : ""), s_max);
                Overlay ov;
                for (auto& q : r.points) ov.points.push_back(q.z);
                for (auto& t : r.turning_points) ov.markers.push_back(t.z);
                ov.color = colors[ci++ % 4];
                plot.overlays.push_back(ov);
            }
            write_png(julia_raster(plot), run.output);
            return 0;
        }
        throw precondition("unknown command");
    } catch (const Error& e) {
        std::cerr << "lamlab: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Numerical: return 2;
            case ErrorKind::Validation: return 3;
            default: return 1;
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "lamlab: malformed JSON input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "lamlab: " << e.what() << "\n";
        return 2;
    }
}
