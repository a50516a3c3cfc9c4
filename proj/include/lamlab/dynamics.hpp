#pragma once
// Numerical dynamics of f(z) = z^3 - 3c^2 z + (2c^3 + v).
#include "lamlab/lamination.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lamlab {

using cplx = std::complex<double>;

struct CubicParam {
    cplx c{0.0, 0.0};
    cplx v{0.0, 0.0};
    cplx b() const { return 2.0 * c * c * c + v; }
    bool operator==(const CubicParam&) const = default;
};

inline cplx evaluate(const CubicParam& a, cplx z) { return z * (z * z - 3.0 * a.c * a.c) + a.b(); }
inline cplx derivative(const CubicParam& a, cplx z) { return 3.0 * (z * z - a.c * a.c); }
inline std::pair<cplx, cplx> critical_points(const CubicParam& a) { return {a.c, -a.c}; }
// f^n(z) and its derivative
cplx iterate(const CubicParam& a, cplx z, int n, cplx* dz = nullptr);
// the three roots of f(z) = w
std::vector<cplx> preimages(const CubicParam& a, cplx w);

struct Tolerances {
    double trace = 1e-10;        // pullback residual |f(z_{k+1}) - z_k|
    double cluster = 1e-6;       // co-landing radius
    double landing = 1e-8;       // tail gap for a landing estimate
    double slice = 1e-12;        // |f^p(c) - c|
    double continuation = 1e-8;  // |Phi(a) - r e^{2 pi i t0}|
};

// ---------------------------------------------------------------- basin of infinity

double green_external(const CubicParam& a, cplx z, int budget = 2000);
// Bottcher coordinate at infinity; needs |z| well outside K.
cplx bottcher_external(const CubicParam& a, cplx z);
// inverse of bottcher_external for |w| large
cplx bottcher_external_inverse(const CubicParam& a, cplx w);
// bounded critical orbits
bool connected_julia(const CubicParam& a, int budget = 2000);

// ---------------------------------------------------------------- super-attracting cycle

struct CycleData {
    CubicParam a;
    int p = 1;
    std::vector<cplx> pts;  // c_0 = c, c_{k+1} = f(c_k)
    double residual = 0;    // |f^p(c) - c|
    cplx lead;              // f^p(c + h) = c + lead h^2 + ...
    double rho = 1e-4;      // model radius on which the inverse Bottcher series is used directly
};

CycleData make_cycle(const CubicParam& a, int p);
// recentred map at cycle point k: f(c_k + h) - c_{k+1}
cplx recentred(const CycleData& cy, int k, cplx h, cplx* dh = nullptr);
// f^p near c, in recentred coordinates
cplx recentred_return(const CycleData& cy, cplx h, cplx* dh = nullptr);
// local Bottcher map at c for h = z - c, principal branches; nullopt if a factor leaves the
// principal domain (|eps_n| >= 1)
std::optional<cplx> bottcher_internal(const CycleData& cy, cplx h);
// recentred point h with bottcher_internal(h) = w, for |w| <= rho
cplx bottcher_internal_inverse(const CycleData& cy, cplx w);
double exp_green_internal(const CubicParam& a, int p, cplx z, int budget = 500);

enum class MilnorType { A, B, C, DOrEscape, Undecided };
std::string to_string(MilnorType t);

struct TypeInfo {
    MilnorType type = MilnorType::Undecided;
    int period = 0;
    int ell = -1;          // smallest l with f^l(-c) in B(c)
    int cycle_index = -1;  // k with -c in B(c_k) for types A/B
    int deg_d = 0;         // deg(f^p | B(c)) - 1
};

// flood fill of the immediate basins on a grid around the cycle and -c
TypeInfo classify(const CubicParam& a, int budget = 64, int grid = 384);
MilnorType classify_type(const CubicParam& a, int budget = 64);

struct GenericCheck {
    bool ok = true;
    std::string reason;
};
GenericCheck generic_check(const CubicParam& a, int p);

// ---------------------------------------------------------------- external rays

struct RayPoint {
    double potential;
    cplx z;
};

enum class RayStatus { Landed, EscapedBudget, Obstructed };
std::string to_string(RayStatus s);

struct ExternalRay {
    Angle theta;
    std::vector<RayPoint> points;  // one point per level, potentials g0 / 3^k
    RayStatus status = RayStatus::EscapedBudget;
    cplx landing{0, 0};
    double landing_error = 0;
    double max_residual = 0;  // max |f(z_{k+1}) - z_k| over consecutive levels
};

struct RayOptions {
    int steps_per_level = 8;
    double target_potential = 1e-18;
    double escape_radius = 1e4;
    Tolerances tol;
};

ExternalRay trace_external_ray(const CubicParam& a, const Angle& theta, double target_potential,
                               int steps_per_level);
ExternalRay trace_external_ray(const CubicParam& a, const Angle& theta, const RayOptions& opt = {});
std::optional<cplx> landing_point(const ExternalRay& ray, double tol, double* err = nullptr);
// trace, estimate the landing point, and retry once with triple depth on a slow tail
ExternalRay trace_and_land(const CubicParam& a, const Angle& theta, const RayOptions& opt = {});

// numerical external angle of a point just outside K (climbs the ray through z)
double external_angle_of(const CubicParam& a, cplx z, int steps_per_level = 8);

// ---------------------------------------------------------------- internal rays

struct FiberAddress {
    int cycle_index = 0;
    std::vector<int> branches;  // inverse-branch tags, applied from the cycle outward
    bool is_cycle() const { return branches.empty(); }
    std::string str() const;
    static FiberAddress parse(const std::string& s);
    bool operator==(const FiberAddress&) const = default;
};

FiberAddress sigma(const FiberAddress& v, int p);
int delta(const FiberAddress& v);
// the model map on (fiber, angle)
std::pair<FiberAddress, Angle> g_tilde(const FiberAddress& v, const Angle& t, int p);
cplx fiber_point(const CycleData& cy, const FiberAddress& v);

struct TurningSequence {
    std::string entries;  // over {L,R}
    std::string tail;     // repeated forever after entries, may be empty
    std::optional<char> at(std::size_t i) const;
    TurningSequence shifted(std::size_t n) const;
    bool empty() const { return entries.empty() && tail.empty(); }
    std::string str() const;
    // "LRL", "L(R)", "(L)", "" for smooth
    static TurningSequence parse(const std::string& s);
};

// where -c sits in the internal-ray model
struct CriticalData {
    bool present = false;
    FiberAddress x, y;
    double t_a = 0, r_a = 0;    // -c = end of the smooth arc (x, t_a) at potential r_a
    double t_a2 = 0, r_a2 = 0;  // and of (y, t_a2) at potential r_a2
};
CriticalData critical_data(const CycleData& cy);

struct TurningPoint {
    double potential;
    cplx z;
    int step;     // f^step(z) = -c
    char branch;  // L or R
};

struct InternalRay {
    FiberAddress v;
    Angle t;
    TurningSequence turning;
    std::vector<RayPoint> points;  // increasing potentials
    std::vector<TurningPoint> turning_points;
    RayStatus status = RayStatus::EscapedBudget;
    cplx landing{0, 0};
    double landing_error = 0;
    double collision_residual = 0;  // max |f^step(z) + c| over turning points
    int samples_per_doubling = 8;
};

struct InternalOptions {
    int samples_per_doubling = 8;
    double collision_offset = 1e-4;  // relative offset in log-potential around a collision
    Tolerances tol;
};

InternalRay trace_internal_ray(const CubicParam& a, int p, const FiberAddress& v, const Angle& t,
                               const TurningSequence& turning, double s_max,
                               const InternalOptions& opt = {});
InternalRay trace_internal_ray(const CycleData& cy, const CriticalData& crit, const FiberAddress& v,
                               const Angle& t, const TurningSequence& turning, double s_max,
                               const InternalOptions& opt = {});
std::optional<cplx> internal_landing(const InternalRay& ray, double tol, double* err = nullptr);
// point of the ray at a traced grid potential
cplx internal_ray_point(const CycleData& cy, const InternalRay& ray, double s);

// ---------------------------------------------------------------- classes and laminations

struct ExternalClass {
    AngleSet angles;
    Angle preferred;
    cplx landing{0, 0};
};

// rays of candidate angles landing within tol of landing; preferred = first counterclockwise
// from the direction `inward` points to (the internal ray's approach direction)
ExternalClass external_class_of(const CubicParam& a, cplx landing, const AngleSet& candidates, double tol,
                                std::optional<cplx> inward = std::nullopt, const RayOptions& opt = {});

struct CharacteristicAngles {
    Angle left, right;
    cplx landing_left, landing_right;
    InternalRay ray_left, ray_right;
    double numeric_left = 0, numeric_right = 0;
};

CharacteristicAngles characteristic_angles(const CubicParam& a, int p, const Angle& t0, int max_den,
                                           const RayOptions& opt = {});

struct EmpiricalLamination {
    Lamination lam;
    std::vector<ExternalRay> rays;  // sorted by angle
    bool tol_stable = true;         // unchanged when tol is halved
    AxiomReport axioms;
};

// single-linkage clusters of the points within tol, as index groups
std::vector<std::vector<std::size_t>> cluster_points(const std::vector<cplx>& pts, double tol);

EmpiricalLamination empirical_rational_lamination_report(const CubicParam& a, int max_den, double tol,
                                                         const RayOptions& opt = {});
Lamination empirical_rational_lamination(const CubicParam& a, int max_den, double tol,
                                         const RayOptions& opt = {});

namespace detail {
// limit of a contracting tail of points; err receives the tail bound
std::optional<cplx> tail_limit(const std::vector<cplx>& zs, double tol, double* err);
}

}
