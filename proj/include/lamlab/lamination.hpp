#pragma once
// Finite-support equivalence relations on the circle with tau_d dynamics.
#include "lamlab/circle.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lamlab {

class Lamination {
public:
    explicit Lamination(int degree = 3, std::vector<AngleSet> classes = {});

    int degree() const { return degree_; }
    const std::vector<AngleSet>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    // index of the stored class containing a
    std::optional<std::size_t> find(const Angle& a) const;
    // the class of a, a singleton if a is not in a stored class
    AngleSet class_of(const Angle& a) const;
    // classes intersected with {den <= max_den}, singletons dropped
    Lamination restricted(int max_den) const;
    std::size_t pair_count() const;
    std::size_t max_class_size() const;

    std::string to_json() const;
    static Lamination from_json(const std::string& text);

    bool operator==(const Lamination& o) const { return degree_ == o.degree_ && classes_ == o.classes_; }
    bool operator!=(const Lamination& o) const { return !(*this == o); }

private:
    int degree_;
    std::vector<AngleSet> classes_;
    std::map<Angle, std::size_t> index_;
};

Lamination closure(int degree, const std::vector<std::pair<Angle, Angle>>& pairs);
// smallest equivalence relation containing both
Lamination join(const Lamination& a, const Lamination& b);
bool contains(const Lamination& coarse, const Lamination& fine);
AngleSet tau_class_image(const Lamination& lam, const AngleSet& e);

enum class Verdict { Pass, Fail, FiniteSupportOnly };
std::string to_string(Verdict v);

struct AxiomResult {
    Verdict verdict = Verdict::Pass;
    std::vector<AngleSet> witness;  // offending class or pair, nonempty iff Fail
    std::string detail;
};

struct AxiomReport {
    AxiomResult r1, r2, r3, r4, r5;
    bool ok() const;
    std::string summary() const;
};

AxiomReport check_axioms(const Lamination& lam);

// R4 for a single class: each complementary arc maps to a complementary arc of the image.
bool consecutive_preserving(int d, const AngleSet& e);
// Hulls of c and b meet at most in shared vertices along one side of b.
bool weakly_unlinked(const AngleSet& c, const AngleSet& b);

struct GeneratorSpec {
    enum class Mode { NonPeriodic, Periodic };
    AngleSet e_star;
    int degree = 3;
    Mode mode = Mode::NonPeriodic;
    // Polygons no pulled-back class may cross. Unset means the default for the mode.
    std::optional<std::vector<AngleSet>> barriers;

    static GeneratorSpec make(const AngleSet& e_star, int degree = 3);
};

// Full preimage polygons of the critical value data used to make the pullback unique.
std::vector<AngleSet> default_barriers(const GeneratorSpec& spec);

std::vector<std::vector<AngleSet>> preimage_pairings(const Lamination& lam, const AngleSet& e,
                                                     const std::vector<AngleSet>& barriers = {});

Lamination minimal_from_generator(const GeneratorSpec& spec, int depth);
Lamination visual_lamination(const Lamination& lam_h, const GeneratorSpec& gen, int depth);

namespace detail {
using Compat = std::function<bool(const AngleSet&)>;
std::vector<std::vector<AngleSet>> pairings(int d, const AngleSet& e, const Compat& compat,
                                            const std::vector<AngleSet>& barriers);
}

}
