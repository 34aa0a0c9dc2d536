#pragma once

#include <map>
#include <string>
#include <vector>

#include "hergo/averages.hpp"
#include "hergo/systems.hpp"

namespace hergo {

struct UnsupportedPath : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DecompositionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// subgroup <g_1, ..., g_K> of R^l
struct SubgroupSpec {
    int ell = 0;
    std::vector<std::vector<TaggedReal>> gens;

    static SubgroupSpec of(std::vector<std::vector<TaggedReal>> gens);
    static SubgroupSpec integer(const std::vector<std::vector<int64_t>>& gens);
    static SubgroupSpec standard(int ell);  // Z^l
    bool rational() const;
    bool integral() const;
    SubgroupSpec scaled(const TaggedReal& c) const;
    // <generators of both>
    SubgroupSpec sum(const SubgroupSpec& o) const;
    std::string str() const;
};

struct SeminormValue {
    enum class Exactness { Exact, MonteCarlo };
    double value = 0;
    Exactness exactness = Exactness::Exact;
    double error = 0;
    bool nonconvergence = false;
};

// distribution of floor(m) acting on X for m uniform over G (finite abelian systems, rational G)
struct ShiftDistribution {
    std::map<int64_t, double> mass;  // state index -> probability
};
ShiftDistribution shift_distribution(const System& sys, const SubgroupSpec& G);
// law of y' - y with y, y' independent copies
ShiftDistribution difference_distribution(const System& sys, const ShiftDistribution& mu);

struct TorusOptions {
    int64_t M = 64;       // first ladder rung (per generator)
    double tol = 1e-2;    // Cauchy criterion on the last two rungs
};

SeminormValue box_seminorm(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                           const TorusOptions& topt = {});
SeminormValue box_seminorm_plus(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                                const TorusOptions& topt = {});

// f_eps for eps = 1 .. 2^s - 1, bit i of the index is eps_{i+1}
Observable dual_function(const System& sys, const std::vector<Observable>& f_eps,
                         const std::vector<SubgroupSpec>& groups);

struct GcsResult {
    double lhs = 0, rhs = 0;
    double sharp = 0;  // prod_eps ||f_eps|| with f_0 = f, classical seminorms
    bool holds = false;
};
GcsResult gcs_check(const System& sys, const Observable& f, const std::vector<Observable>& f_eps,
                    const std::vector<SubgroupSpec>& groups);

struct PropertyReport {
    double symmetry_gap = 0;      // max over permutations, both seminorms
    std::vector<double> chain;    // ||f||_s, ||f||+_s, ||f||_{s+1}, ||f||+_{s+1}
    double chain_violation = 0;   // max positive step down the chain
    double subgroup_violation = 0;
    bool part_v_applicable = false;
    double part_v_gap = 0;
    double rescaling_ratio = 0;   // ||f||+ along 2G over ||f||+ along G, logged only
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
PropertyReport property_suite(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                              const SubgroupSpec& extra, double tol = 1e-9);

// projection onto the characters with nonzero (classical) seminorm
Observable factor_project(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups);
// character coefficients of a table on a finite abelian group, index = state index of the frequency
std::vector<cplx> character_coefficients(const Observable& f);
Observable from_character_coefficients(const SpaceCPtr& sp, const std::vector<cplx>& c);

std::pair<Observable, Observable> concat_decompose(const System& sys, const Observable& f,
                                                   const std::vector<SubgroupSpec>& G_list, const SubgroupSpec& H,
                                                   const SubgroupSpec& Hp);

struct ComparisonReport {
    bool precondition_log = false;  // beta2 a1 - beta1 a2 << log
    double difference_residual = 0;
    std::vector<std::pair<double, double>> pairs;  // (plus seminorm along Z^l, <e1,e2>; seminorm along beta1 e1 - beta2 e2)
    double delta = 0, eps = 0;
    bool implication_holds = true;
};
ComparisonReport seminorm_comparison_check(const System& sys, const HardyExpr& a1, const HardyExpr& a2,
                                           const TaggedReal& beta1, const TaggedReal& beta2,
                                           const std::vector<Observable>& family, int64_t N, double delta = 1e-9,
                                           double eps = 1e-6);

}  // namespace hergo
