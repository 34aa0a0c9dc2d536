#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hergo/tagged_real.hpp"

namespace hergo {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotOrderable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotInSpan : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AmbiguousFloor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// x^power * (log x)^log_exp, ordered by growth
struct GrowthAtom {
    Rat power = 0;
    int log_exp = 0;

    bool is_unit() const { return power == 0 && log_exp == 0; }
    bool is_log() const { return power == 0 && log_exp == 1; }
    // x^l with l a positive integer
    bool is_integer_monomial() const { return log_exp == 0 && power > 0 && rat_is_integer(power); }
    bool above_log() const { return power > 0 || log_exp > 1; }
    std::strong_ordering operator<=>(const GrowthAtom& o) const;
    bool operator==(const GrowthAtom& o) const = default;
};

struct HardyTerm {
    TaggedReal coef;
    GrowthAtom atom;
};

class HardyExpr {
public:
    HardyExpr() = default;
    explicit HardyExpr(const TaggedReal& c) : constant_(c) {}

    static HardyExpr x();
    static HardyExpr monomial(const TaggedReal& coef, const Rat& power, int log_exp = 0, int log_base = 0);
    static HardyExpr parse(const std::string& text);

    const std::vector<HardyTerm>& terms() const { return terms_; }
    const TaggedReal& constant() const { return constant_; }
    // 0 means natural logarithm, otherwise an integer base >= 2
    int log_base() const { return log_base_; }
    bool has_logs() const;
    bool is_constant() const { return terms_.empty(); }
    bool is_zero() const { return terms_.empty() && constant_.is_zero(); }
    // leading atom, (0,0) for constants
    GrowthAtom leading_atom() const;
    TaggedReal leading_coef() const;
    // nonzero coefficient of an atom, or 0
    TaggedReal coef_of(const GrowthAtom& a) const;

    std::string str() const;

    friend HardyExpr operator+(const HardyExpr& a, const HardyExpr& b);
    friend HardyExpr operator-(const HardyExpr& a, const HardyExpr& b);
    friend HardyExpr operator-(const HardyExpr& a);
    friend HardyExpr operator*(const HardyExpr& a, const HardyExpr& b);
    friend HardyExpr operator*(const TaggedReal& c, const HardyExpr& a);
    friend bool operator==(const HardyExpr& a, const HardyExpr& b);

private:
    std::vector<HardyTerm> terms_;  // strictly descending atoms, nonzero coefficients
    TaggedReal constant_;
    int log_base_ = 0;

    void add_term(const TaggedReal& c, const GrowthAtom& a);
    void normalize();
    friend class HardyBuilder;
};

// Scalars accept the same grammar; the expression must be constant.
TaggedReal parse_tagged(const std::string& s);

// ---- evaluation ----

// a(x) in double-double; x must exceed 1
DD eval(const HardyExpr& e, const DD& x);
// 200-bit evaluation, used as oracle and escalation path
mp200 eval_mp(const HardyExpr& e, const mp200& x);

struct FloorStats {
    uint64_t exact = 0;      // exact rational / quadratic path
    uint64_t dd = 0;         // double-double with certified margin
    uint64_t escalated = 0;  // needed 200-bit evaluation
    uint64_t ambiguous = 0;  // skipped
};

// Compiled evaluator for a(n) at positive integers n.  Immutable after construction.
class SequenceEvaluator {
public:
    explicit SequenceEvaluator(const HardyExpr& e);
    SequenceEvaluator(const HardyExpr& e, bool allow_mp200);

    // a(n) in double-double, with a bound on the absolute error
    DD value(int64_t n, double* err = nullptr) const;
    // floor(a(n)); nullopt when the certified interval contains an integer
    std::optional<int64_t> floor_at(int64_t n, FloorStats* stats = nullptr) const;
    const HardyExpr& expr() const { return e_; }
    bool has_exact_form() const { return exact_kind_ != 0; }

private:
    HardyExpr e_;
    bool allow_mp_;
    std::vector<DD> coef_dd_;
    DD const_dd_{};
    DD inv_log_base_{1.0};
    bool need_log_ = false;

    // exact fast path: a(n) = (A(n) + B(n) sqrt(R(n))) / D with integer polynomials A, B
    // kind 1: B = 0; 2: R = d0; 3: R = n; 4: R = d0*n
    int exact_kind_ = 0;
    int64_t d0_ = 1;
    std::vector<BigInt> A_, B_;
    BigInt D_ = 1;
    bool small_ = false;  // A_, B_, D_ fit comfortably in 64 bits
    std::vector<__int128> Ai_, Bi_;
    __int128 Di_ = 1;

    std::optional<BigInt> floor_exact_form(int64_t n) const;
    bool floor_exact_small(int64_t n, __int128* out) const;
    std::optional<BigInt> floor_exact_terms(int64_t n) const;
};

// process-wide default for 200-bit escalation of ambiguous floors (on unless --precision dd)
void set_mp200_escalation(bool on);
bool mp200_escalation();

// floor(a(n)); throws AmbiguousFloor if undecidable at 200 bits with no exact form
int64_t floor_iter(const HardyExpr& e, int64_t n);

// ---- growth and classification ----

enum class GrowthRelation { StrictlySlower, Comparable, StrictlyFaster };
struct GrowthComparison {
    GrowthRelation rel;
    std::optional<TaggedReal> ratio;  // when Comparable
};
GrowthComparison growth_compare(const HardyExpr& a, const HardyExpr& b);

enum class ClassKind { AlmostRationalPolynomial, LogFarFromQ, SubLogarithmic };
struct ClassificationResult {
    ClassKind kind;
    HardyExpr poly;           // the rational polynomial part p (AlmostRationalPolynomial, SubLogarithmic)
    bool far_from_R = false;  // also stays logarithmically away from R[x]
    std::string name() const;
};
ClassificationResult classify(const HardyExpr& e);
bool is_equidistributed(const HardyExpr& e);
bool stays_log_away_from_R(const HardyExpr& e);
bool pairwise_independent(const HardyExpr& a, const HardyExpr& b);

ClassificationResult difference_class(const HardyExpr& ai, const HardyExpr& aj, const TaggedReal& ci,
                                      const TaggedReal& cj);
// true iff c_i a_i - c_j a_j is an almost rational polynomial or stays
// logarithmically away from Q[x] for every real (c_i, c_j)
bool difference_nonpathological(const HardyExpr& ai, const HardyExpr& aj);

struct OrderedFamily {
    std::vector<HardyExpr> members;
    size_t m1 = 0, m2 = 0, m3 = 0;
};
OrderedFamily ordered_family(const std::vector<HardyExpr>& list);

struct DegreeLeading {
    size_t degree = 0;  // 1-based index into members, 0 for none
    TaggedReal coefficient;
    std::vector<TaggedReal> betas;  // beta_0..beta_m
};
DegreeLeading degree_and_leading(const HardyExpr& e, const OrderedFamily& fam);

}  // namespace hergo
