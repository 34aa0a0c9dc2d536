#pragma once

// Bundled corpora and the experiment recipes behind the CLI and the acceptance runner.

#include <map>
#include <string>
#include <vector>

#include "hergo/config.hpp"
#include "hergo/expsum_suite.hpp"

namespace hergo {

inline constexpr const char* kVersion = "hardy-ergo 1.0";

// ---- equidistribution corpus ----

std::vector<std::string> weyl_corpus();
// |E_{n<=N} e(k a(n))| for k = 1..K
std::vector<double> weyl_sums(const HardyExpr& a, int64_t N, int K);
struct WeylRow {
    std::string expr;
    std::string classification;
    bool verdict = false;   // classifier: equidistributed
    std::vector<double> sums;
    double max_sum = 0;
    bool agree = false;     // verdict ? max_sum <= low : max_sum >= high
};
WeylRow weyl_check(const std::string& expr, int64_t N, int K = 5, double low = 0.05, double high = 0.5);

// ---- seminorm instances, each a pure function of (seed, index) ----

struct PropsInstance {
    std::string label;
    System sys;
    Observable f;
    std::vector<SubgroupSpec> groups;
    SubgroupSpec extra;
};
// index 0 is Z/9 with G = <1>, the G vs 2G instance
PropsInstance props_instance(uint64_t seed, size_t index);

struct GcsInstance {
    std::string label;
    System sys;
    Observable f;
    std::vector<Observable> f_eps;
    std::vector<SubgroupSpec> groups;
};
GcsInstance gcs_instance(uint64_t seed, size_t index);

struct ConcatInstance {
    std::string label;
    System sys;
    Observable f;  // orthogonal to the factor of G_list + {H + H'}
    std::vector<SubgroupSpec> G_list;
    SubgroupSpec H, Hp;
};
// index < 520: empty G_list; beyond: one extra group
ConcatInstance concat_instance(uint64_t seed, size_t index);
struct ConcatRow {
    std::string label;
    int64_t order = 0;
    double f_norm = 0, g1_seminorm = 0, g2_seminorm = 0, sum_error = 0;
    bool ok = false;
    std::string error;
};
ConcatRow concat_check(const ConcatInstance& inst, double tol = 1e-9);

// ---- rotations with a_1 = ... = a_l = x ----

struct RotationConfig {
    std::string label;
    System sys;
    std::vector<Observable> f;
};
std::vector<RotationConfig> bergelson_berend_matrix();
struct RotationRow {
    std::string label;
    double joint = 0;
    std::vector<double> difference;  // pairs i < j
    double product = 0;
    bool conditions = false, joint_pass = false, agree = false;
};
RotationRow bergelson_berend_check(const RotationConfig& c, int64_t N, double eps = 0.05);

// ---- Cesaro-convergent scalar sequences ----

struct SyntheticSequence {
    std::string name;
    std::vector<cplx> v;
    cplx limit;
};
std::vector<SyntheticSequence> synthetic_sequences(int64_t N);
struct DyadicRow {
    std::string name;
    double cesaro_residual = 0;  // |C_N - L|
    double ratio_2 = 0, ratio_15 = 0;
    bool ok = false;
};
DyadicRow dyadic_lemma_check(const SyntheticSequence& s, double factor = 10.0);

// ---- counterexample pair (n, n + floor(log2 n)) ----

struct CounterexampleRow {
    std::string name;
    double residual = 0;
    std::string expect;  // "<= t", ">= t", ">  t" or "logged"
    double threshold = 0;
    bool ok = false;
};
std::vector<CounterexampleRow> counterexample_demo(int64_t N_cat, int64_t N_rot, double joint_max, double rot_min,
                                                   uint64_t seed);

// ---- runner ----

struct RunContext {
    uint64_t seed = 1;
};
struct RecipeResult {
    json summary = json::object();
    std::vector<json> instances;  // each carries "index" and "pass"
    std::map<std::string, std::string> csv;
    bool summary_pass = true;
    bool pass() const;
};
std::vector<std::string> recipe_kinds();
// `only` restricts evaluation to the given instance indices (replay)
RecipeResult run_recipe(const std::string& kind, const json& params, const RunContext& ctx,
                        const std::vector<size_t>* only = nullptr);

}  // namespace hergo
