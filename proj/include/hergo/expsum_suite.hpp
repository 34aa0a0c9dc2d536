#pragma once

// Bundled parameter suites for the exponential-sum checks, shared by the CLI and the acceptance runner.

#include <string>
#include <vector>

#include "hergo/expsums.hpp"

namespace hergo {

struct OracleTuple {
    ExpSumCase c;
    Rat q, r;
    TaggedReal s;
    TaggedReal t() const { return TaggedReal(q) + c.beta * (TaggedReal(r) + s); }
    std::string label() const;
};

// 20 tuples per case, consecutive tuples share their sequence
std::vector<OracleTuple> bundled_oracle_suite();

struct OracleRow {
    CaseKind kind;
    std::string label;
    cplx closed, brute1, brute2;
    double err1 = 0, err2 = 0;
    bool exact_zero = false;
    std::vector<int> fired;
    int64_t skipped = 0;
};
std::vector<OracleRow> run_oracle_suite(const std::vector<OracleTuple>& suite, int64_t N1, int64_t N2);

struct OracleSummary {
    CaseKind kind;
    int tuples = 0;
    double max_err1 = 0;
    double sum_err1 = 0, sum_err2 = 0;
    double aggregate_ratio = 0;  // sum err2 / sum err1
    int ratio_pass = 0;          // tuples with err2 <= ratio * err1
    bool pass = false;
};
std::vector<OracleSummary> summarize_oracle(const std::vector<OracleRow>& rows, double tol = 0.05,
                                            double ratio = 0.6, int min_tuples = 20);

// exact enumeration: closed form zero iff some vanishing condition fires
struct VanishingReport {
    CaseKind kind;
    int64_t points = 0;
    int64_t zeros = 0;
    int64_t mismatches = 0;
    int64_t numeric_mismatches = 0;  // |value| < 1e-12 disagreeing with the exact flag
    std::vector<std::string> first_mismatches;
    std::vector<ZeroSetLabel> labels;  // zero-set labels at every point
    int64_t e3_candidates = 0;
    int64_t e3_violations = 0;
};
// lattice: c <= cmax, |q|, |r| <= 3 with q, r in (1/c)Z; s on the (1/12)-grid plus s = m/beta - r
VanishingReport vanishing_enumeration(const ExpSumCase& c, int cmax = 6, bool keep_labels = false);
// the representative sequence per case used by the enumeration
std::vector<ExpSumCase> vanishing_cases();

struct ScalingRow {
    TaggedReal gamma;
    ScalingBranch branch;
    cplx c, C, brute;
    double identity_err = 0;  // |c C - int e(gamma y)|
    double brute_err = 0;     // |C - brute|
};
std::vector<TaggedReal> bundled_gammas();
std::vector<ScalingRow> run_scaling_suite(const TaggedReal& beta, const std::vector<TaggedReal>& gammas, int64_t N);
std::string branch_name(ScalingBranch b);

}  // namespace hergo
