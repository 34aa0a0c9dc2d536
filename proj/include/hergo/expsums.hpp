#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hergo/cyclo.hpp"
#include "hergo/hardy.hpp"

namespace hergo {

struct CaseMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct QDependenceInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct QDependenceUndecidable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using cplx = std::complex<double>;

enum class CaseKind { Generic, CaseK, CaseL, CaseKL, Linear };
std::string case_name(CaseKind k);
CaseKind case_from_name(const std::string& s);

// a = (p - k u)/(k beta + l) for the special cases; Generic asserts that no such form exists.
struct ExpSumCase {
    CaseKind kind = CaseKind::Generic;
    HardyExpr a;
    TaggedReal beta;
    TaggedReal u;
    int64_t k = 0, l = 0;
    HardyExpr p;

    // Checks the declared decomposition exactly and normalizes CaseKL to l > 0.
    // Throws CaseMismatch.
    void validate();

    static ExpSumCase generic(const HardyExpr& a, const TaggedReal& beta, const TaggedReal& u);
    // a is derived from (k, l, p, u) and then validated
    static ExpSumCase special(CaseKind kind, int64_t k, int64_t l, const HardyExpr& p, const TaggedReal& beta,
                              const TaggedReal& u);
    static ExpSumCase linear(const TaggedReal& beta);
};

// e(x) - style helpers
cplx e_of(const TaggedReal& x);
// int_0^1 e(theta x) dx
cplx unit_integral(const TaggedReal& theta);

// ---- brute force ----

struct BruteResult {
    cplx value;
    int64_t used = 0;     // terms averaged
    int64_t skipped = 0;  // ambiguous floors
};

// Floors of a(n) and beta*a(n)+u for n in [1, Nmax], computed once.
class BruteEngine {
public:
    BruteEngine(const HardyExpr& a, const TaggedReal& beta, const TaggedReal& u, int64_t Nmax);
    // e(us) E_{n<=N} e(floor(a(n)) t - floor(beta a(n) + u) s)
    BruteResult A(const TaggedReal& t, const TaggedReal& s, int64_t N, int threads = 0) const;
    int64_t nmax() const { return nmax_; }
    const FloorStats& stats() const { return stats_; }

private:
    TaggedReal u_;
    int64_t nmax_;
    std::vector<int64_t> fa_, fb_;
    std::vector<uint8_t> ok_;
    std::vector<int64_t> skip_prefix_;
    FloorStats stats_;
};

BruteResult brute_A(const HardyExpr& a, const TaggedReal& beta, const TaggedReal& u, const TaggedReal& t,
                    const TaggedReal& s, int64_t N);
// E_{n<=N} e(t n - floor(beta n) s)
BruteResult brute_B(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s, int64_t N);

// ---- closed forms ----

struct ClosedValue {
    cplx value;
    bool exact_zero = false;   // from exact evaluation of every factor
    std::vector<int> fired;    // vanishing conditions of the lemma that hold (1-based)
    std::string formula;
};

// t - beta s = q + beta r with q, r rational; nullopt when t - beta s, beta, 1 are Q-independent.
// Throws QDependenceUndecidable for flagged inputs.
std::optional<std::pair<Rat, Rat>> q_dependence(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s);

ClosedValue closed_A(const ExpSumCase& c, const Rat& q, const Rat& r, const TaggedReal& t, const TaggedReal& s);
ClosedValue closed_B(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s);

// Displayed formulas without any validation of (q, r) against (t, s).
ClosedValue generic_formula(const Rat& q, const Rat& r, const TaggedReal& t, const TaggedReal& s,
                            const TaggedReal& u, const TaggedReal& beta);
ClosedValue caseK_formula(int64_t k, const HardyExpr& p, const Rat& q, const Rat& r, const TaggedReal& t,
                          const TaggedReal& s, const TaggedReal& u, const TaggedReal& beta);
ClosedValue caseL_formula(int64_t l, const HardyExpr& p, const Rat& q, const Rat& r, const TaggedReal& t,
                          const TaggedReal& s, const TaggedReal& u, const TaggedReal& beta);
ClosedValue caseKL_formula(int64_t k, int64_t l, const HardyExpr& p, const Rat& q, const Rat& r,
                           const TaggedReal& t, const TaggedReal& s, const TaggedReal& u, const TaggedReal& beta);
ClosedValue linear_formula(const Rat& q, const Rat& r, const TaggedReal& s, const TaggedReal& beta);

// E_{j' in [0, l-1]} e(j' |k| beta) evaluated literally, and its closed value
cplx kl_witness_sum(int64_t k, int64_t l, const TaggedReal& beta);
cplx kl_witness_value(int64_t k, int64_t l, const TaggedReal& beta);

// ---- zero sets ----

enum class ZeroSetKind { E1, E2, E3Candidate };
struct ZeroSetLabel {
    ZeroSetKind kind;
    std::optional<TaggedReal> gamma;
    std::string str() const;
};
ZeroSetLabel classify_zero_set(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s,
                               const ExpSumCase& c);
// same, from an already evaluated closed_A at the witness (q, r)
ZeroSetLabel label_zero_set(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s, const Rat& q,
                            const Rat& r, const ClosedValue& A);

// ---- scaling constants ----

enum class ScalingBranch { IntegerGamma, RationalGamma, RationalBetaGamma, Irrational };
struct ScalingConstant {
    ScalingBranch branch;
    cplx c;         // c_{beta,gamma}
    cplx C;         // C_{beta,gamma}
    cplx integral;  // int_0^1 e(gamma y) dy
};
ScalingConstant scaling_constant(const TaggedReal& beta, const TaggedReal& gamma);
// E_{n,m<=N} e(floor(n/(beta gamma)) beta gamma + floor(-m/gamma) gamma), separable
cplx scaling_brute(const TaggedReal& beta, const TaggedReal& gamma, int64_t N);

}  // namespace hergo
