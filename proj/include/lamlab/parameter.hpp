#pragma once
// Milnor slices S_p, the component map Phi and parameter internal rays.
#include "lamlab/dynamics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lamlab {

struct SliceParam {
    int p = 1;
    CubicParam a;
    double residual = 0;  // |f^p(c) - c|
};

// Newton in v with c held fixed; p = 1 is the family (c, c)
SliceParam solve_slice(int p, const CubicParam& seed, double tol = 1e-12);

struct ComponentRef {
    MilnorType type = MilnorType::A;
    int ell = 0;
    int deg_d = 2;
    int cycle_index = 0;
    SliceParam witness;
};

ComponentRef component_of(const SliceParam& witness);
// internal Bottcher coordinate of f^ell(-c); `near` picks the square-root branch when the
// coordinate has to be pulled back from a later iterate
cplx phi_component(const ComponentRef& ref, const SliceParam& a, std::optional<cplx> near = std::nullopt);

enum class Combinatorics { Periodic, NonPeriodic };
std::string to_string(Combinatorics c);
// periodic iff (x, t0) is periodic under the model map
Combinatorics combinatorics_of(const ComponentRef& ref, const Angle& t0);

struct PathPoint {
    double r;  // co-radius: |Phi| = 1 - r
    CubicParam a;
    double slice_residual = 0;
    double phi_residual = 0;  // |Phi(a) - (1 - r) e^{2 pi i t0}|
};

enum class PathStatus { Complete, Stalled };

struct ParamRayOptions {
    double r_start = 0.9;
    double ratio = 0.9;
    std::vector<double> waypoints{0.8, 0.3, 0.05};
    int node_count = 6;  // extra points 0.05 * 2^-j used by the boundary observation
    Tolerances tol;
};

struct BoundaryEstimate {
    int p = 1;
    Angle t0;
    std::vector<PathPoint> path;  // r decreasing
    PathStatus status = PathStatus::Complete;
    std::string message;
    bool has_a0 = false;
    CubicParam a0;
    double extrapolation_gap = 0;  // |a0(order 2) - a0(order 3)|
    std::optional<CubicParam> a0_refined;
    std::string boundary_kind;  // misiurewicz k+n / parabolic n
    double refine_residual = 0;
    Combinatorics combinatorics = Combinatorics::NonPeriodic;
    std::optional<Lamination> predicted;

    std::string to_json() const;
    static BoundaryEstimate from_json(const std::string& text);
};

BoundaryEstimate trace_parameter_ray(const ComponentRef& ref, const Angle& t0, double r_min, int steps,
                                     const ParamRayOptions& opt = {});
// parameter on the ray at co-radius r, corrected from the nearest path point
PathPoint ray_parameter_at(const ComponentRef& ref, const BoundaryEstimate& est, double r);

// polynomial extrapolation of the last 8 path points to r = 0; fills a0 and combinatorics
void boundary_landing(BoundaryEstimate& est);
// Newton on the boundary condition named by a characteristic angle: f^{k+n}(-c) = f^k(-c)
// for a strictly preperiodic angle, a parabolic n-cycle for a periodic one
void refine_boundary(const ComponentRef& ref, BoundaryEstimate& est, const Angle& theta);

// ---------------------------------------------------------------- prediction and observation

struct Prediction {
    CharacteristicAngles chars;
    double r_chars = 0.3;
    GeneratorSpec generator;
    Lamination lam_h;  // empirical lamination of the interior witness
    Lamination predicted;
};

Prediction predict_boundary_lamination(const ComponentRef& ref, const BoundaryEstimate& est, int depth, int max_den,
                                       const RayOptions& opt = {});

struct Observation {
    Lamination lam;
    std::vector<double> node_r;
    std::vector<CubicParam> nodes;
    std::vector<Angle> angles;                // all angles of den <= max_den
    std::vector<std::vector<cplx>> landings;  // landings[node][angle]
    std::size_t pairs_tested = 0;
    double worst_colanding = 0;  // largest extrapolated gap among accepted pairs
    double best_separated = 0;   // smallest extrapolated gap among rejected candidates
};

// co-landing at a0 from the extrapolated squared landing distance of each close pair
Observation observe_boundary_lamination(const ComponentRef& ref, const BoundaryEstimate& est, int max_den,
                                        double tol = 1e-5, const RayOptions& opt = {});

struct CompareReport {
    std::vector<AngleSet> only_predicted, only_observed;
    std::size_t angles = 0, agreeing = 0;
    double agreement = 100.0;  // percent of angles with the same class in both
    std::string to_json() const;
};

CompareReport compare_prediction(const Lamination& predicted, const Lamination& observed, int max_den);

struct RigidityReport {
    bool indistinguishable = false;  // same lambda_Q at this denominator bound
    std::size_t new_classes = 0;
    int min_new_den = 0;  // smallest denominator occurring in a class not in the interior lamination
    std::string verdict;
};

RigidityReport rigidity_probe(const Lamination& interior, const Lamination& predicted, int max_den);

}
