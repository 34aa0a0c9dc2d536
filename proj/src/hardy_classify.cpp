#include <algorithm>

#include "hergo/hardy.hpp"

namespace hergo {

namespace {

bool exact_zero(const TaggedReal& x) {
    if (x.is_exact()) return x.is_zero();
    if (x.assume_irrational()) return false;
    throw Undecidable("cannot decide whether " + x.str() + " vanishes");
}

// is x a rational number? (Undecidable for unflagged floats)
bool rational_value(const TaggedReal& x) { return x.rational_or_throw(); }

// x = r0 + r1*sqrt(d) with a single d shared across a computation
struct FieldParts {
    Rat r0, r1;
    int64_t d = 0;
};
FieldParts split_field(const TaggedReal& x, int64_t* shared_d) {
    if (x.kind() == TaggedReal::Kind::Rational) return {x.a(), 0, 0};
    if (x.kind() == TaggedReal::Kind::Flagged) throw Undecidable("flagged coefficient in quantifier elimination");
    if (*shared_d == 0) *shared_d = x.d();
    if (*shared_d != x.d()) throw Undecidable("coefficients from two quadratic fields");
    return {x.a(), x.b(), x.d()};
}

}  // namespace

std::string ClassificationResult::name() const {
    switch (kind) {
        case ClassKind::AlmostRationalPolynomial: return "AlmostRationalPolynomial";
        case ClassKind::LogFarFromQ: return "LogFarFromQ";
        case ClassKind::SubLogarithmic: return "SubLogarithmic";
    }
    return "?";
}

GrowthComparison growth_compare(const HardyExpr& a, const HardyExpr& b) {
    if (a.is_zero() || b.is_zero()) throw DomainError("growth_compare needs nonzero expressions");
    GrowthAtom la = a.leading_atom(), lb = b.leading_atom();
    if (la < lb) return {GrowthRelation::StrictlySlower, std::nullopt};
    if (la > lb) return {GrowthRelation::StrictlyFaster, std::nullopt};
    return {GrowthRelation::Comparable, a.leading_coef() / b.leading_coef()};
}

ClassificationResult classify(const HardyExpr& e) {
    ClassificationResult res{ClassKind::AlmostRationalPolynomial, HardyExpr(), false};
    std::vector<HardyTerm> rest;
    for (auto& t : e.terms()) {
        if (t.atom.is_integer_monomial() && rational_value(t.coef)) {
            res.poly = res.poly + HardyExpr::monomial(t.coef, t.atom.power);
            continue;
        }
        rest.push_back(t);
    }
    if (rest.empty()) return res;
    bool above = std::any_of(rest.begin(), rest.end(), [](const HardyTerm& t) { return t.atom.above_log(); });
    if (above) {
        res.kind = ClassKind::LogFarFromQ;
        res.poly = HardyExpr();
        res.far_from_R = stays_log_away_from_R(e);
        return res;
    }
    res.kind = ClassKind::SubLogarithmic;
    return res;
}

bool stays_log_away_from_R(const HardyExpr& e) {
    return std::any_of(e.terms().begin(), e.terms().end(),
                       [](const HardyTerm& t) { return t.atom.above_log() && !t.atom.is_integer_monomial(); });
}

bool is_equidistributed(const HardyExpr& e) { return classify(e).kind == ClassKind::LogFarFromQ; }

bool pairwise_independent(const HardyExpr& a, const HardyExpr& b) {
    auto above = [](const HardyExpr& e) {
        std::vector<HardyTerm> v;
        for (auto& t : e.terms())
            if (t.atom.above_log()) v.push_back(t);
        return v;
    };
    auto sa = above(a), sb = above(b);
    if (sa.empty() || sb.empty()) return false;
    if (sa.size() != sb.size()) return true;
    for (size_t i = 0; i < sa.size(); ++i)
        if (sa[i].atom != sb[i].atom) return true;
    TaggedReal lam = sa[0].coef / sb[0].coef;
    for (size_t i = 1; i < sa.size(); ++i)
        if (!exact_zero(sa[i].coef - lam * sb[i].coef)) return true;
    return false;
}

ClassificationResult difference_class(const HardyExpr& ai, const HardyExpr& aj, const TaggedReal& ci,
                                      const TaggedReal& cj) {
    return classify(ci * ai - cj * aj);
}

bool difference_nonpathological(const HardyExpr& ai, const HardyExpr& aj) {
    // c = (ci, cj); coefficient of atom A in ci*ai - cj*aj is u_A . c with u_A = (alpha_A, -beta_A)
    std::vector<GrowthAtom> atoms;
    for (auto* e : {&ai, &aj})
        for (auto& t : e->terms())
            if (std::find(atoms.begin(), atoms.end(), t.atom) == atoms.end()) atoms.push_back(t.atom);
    using Row = std::array<TaggedReal, 2>;
    std::vector<Row> U1, U2;
    Row ell{TaggedReal(0), TaggedReal(0)};
    for (auto& A : atoms) {
        Row u{ai.coef_of(A), -aj.coef_of(A)};
        if (A.is_log())
            ell = u;
        else if (A.is_integer_monomial())
            U2.push_back(u);
        else
            U1.push_back(u);
    }
    auto dot = [](const Row& u, const Row& v) { return u[0] * v[0] + u[1] * v[1]; };
    auto row_zero = [](const Row& u) { return exact_zero(u[0]) && exact_zero(u[1]); };

    // basis of W = ker U1
    std::vector<Row> basis;
    const Row* nz = nullptr;
    for (auto& u : U1)
        if (!row_zero(u)) {
            nz = &u;
            break;
        }
    if (!nz) {
        basis = {Row{TaggedReal(1), TaggedReal(0)}, Row{TaggedReal(0), TaggedReal(1)}};
    } else {
        Row k{-(*nz)[1], (*nz)[0]};
        for (auto& u : U1)
            if (!exact_zero(dot(u, k))) return true;  // W = {0}: no combination survives
        basis = {k};
    }

    if (basis.size() == 1) {
        TaggedReal l1 = dot(ell, basis[0]);
        if (exact_zero(l1)) return true;
        // exists lambda != 0 with lambda * (U2 basis) rational?
        std::vector<TaggedReal> n;
        for (auto& u : U2) n.push_back(dot(u, basis[0]));
        const TaggedReal* piv = nullptr;
        for (auto& x : n)
            if (!exact_zero(x)) {
                piv = &x;
                break;
            }
        if (!piv) return false;
        for (auto& x : n)
            if (!rational_value(x / *piv)) return true;
        return false;
    }

    // W = R^2
    if (row_zero(ell)) return true;
    const Row* r1 = nullptr;
    for (auto& u : U2)
        if (!row_zero(u)) {
            r1 = &u;
            break;
        }
    if (!r1) return false;  // every lambda keeps rational coefficients
    const Row* r2 = nullptr;
    for (auto& u : U2)
        if (!exact_zero((*r1)[0] * u[1] - (*r1)[1] * u[0])) {
            r2 = &u;
            break;
        }
    if (!r2) {
        // rank 1: kernel spanned by kappa
        Row kappa{-(*r1)[1], (*r1)[0]};
        if (!exact_zero(dot(ell, kappa))) return false;
        // image is the line through the column N e_i for a nonzero column i
        int col = exact_zero((*r1)[0]) ? 1 : 0;
        std::vector<TaggedReal> v;
        for (auto& u : U2) v.push_back(u[col]);
        const TaggedReal* piv = nullptr;
        for (auto& x : v)
            if (!exact_zero(x)) {
                piv = &x;
                break;
            }
        for (auto& x : v)
            if (!rational_value(x / *piv)) return true;
        return false;
    }
    // rank 2: lambda = P^{-1} y with y in Q^2 given by the pivot rows
    TaggedReal det = (*r1)[0] * (*r2)[1] - (*r1)[1] * (*r2)[0];
    Row pinv0{(*r2)[1] / det, -(*r2)[0] / det};  // first column of P^{-1}
    Row pinv1{-(*r1)[1] / det, (*r1)[0] / det};  // second column
    // M_k = N_k P^{-1}; require its irrational part to annihilate y
    int64_t d = 0;
    std::vector<std::array<Rat, 2>> cons;
    for (auto& u : U2) {
        FieldParts m0 = split_field(dot(u, pinv0), &d);
        FieldParts m1 = split_field(dot(u, pinv1), &d);
        if (m0.r1 != 0 || m1.r1 != 0) cons.push_back({m0.r1, m1.r1});
    }
    Row g{dot(ell, pinv0), dot(ell, pinv1)};
    if (cons.empty()) return false;  // g != 0 since ell != 0 and P invertible
    // rational null space of cons
    std::array<Rat, 2> c0 = cons[0];
    std::array<Rat, 2> ystar{-c0[1], c0[0]};
    for (auto& c : cons)
        if (c[0] * ystar[0] + c[1] * ystar[1] != 0) return true;  // only y = 0
    TaggedReal gy = g[0] * TaggedReal(ystar[0]) + g[1] * TaggedReal(ystar[1]);
    return exact_zero(gy);
}

OrderedFamily ordered_family(const std::vector<HardyExpr>& list) {
    std::vector<HardyExpr> b1, b2, b3, b4;
    for (size_t i = 0; i < list.size(); ++i) {
        const HardyExpr& q = list[i];
        if (q.is_constant()) throw NotOrderable("member " + q.str() + " does not grow");
        for (size_t j = 0; j < i; ++j)
            if (list[j].leading_atom() == q.leading_atom())
                throw NotOrderable("members " + list[j].str() + " and " + q.str() + " have comparable growth");
        GrowthAtom a = q.leading_atom();
        bool pure_monomial = q.terms().size() == 1 && q.constant().is_zero() && q.leading_coef() == TaggedReal(1);
        if (a.is_log())
            b1.push_back(q);
        else if (a.power == 0)
            b2.push_back(q);
        else if (a.is_integer_monomial() && pure_monomial)
            b3.push_back(q);
        else if (a.is_integer_monomial())
            throw NotOrderable(q.str() + " is neither a monomial x^l nor strongly nonpolynomial");
        else
            b4.push_back(q);
    }
    auto by_growth = [](const HardyExpr& x, const HardyExpr& y) { return x.leading_atom() < y.leading_atom(); };
    for (auto* b : {&b1, &b2, &b3, &b4}) std::sort(b->begin(), b->end(), by_growth);
    OrderedFamily f;
    for (auto* b : {&b1, &b2, &b3, &b4}) f.members.insert(f.members.end(), b->begin(), b->end());
    f.m1 = b1.size();
    f.m2 = f.m1 + b2.size();
    f.m3 = f.m2 + b3.size();
    return f;
}

DegreeLeading degree_and_leading(const HardyExpr& e, const OrderedFamily& fam) {
    const size_t m = fam.members.size();
    DegreeLeading out;
    out.betas.assign(m + 1, TaggedReal(0));
    HardyExpr rem = e;
    while (!rem.is_constant()) {
        GrowthAtom top = rem.leading_atom();
        size_t idx = m;
        for (size_t i = 0; i < m; ++i)
            if (fam.members[i].leading_atom() == top) idx = i;
        if (idx == m) throw NotInSpan(e.str() + " is not in the extended span (atom without a member)");
        TaggedReal lam = rem.leading_coef() / fam.members[idx].leading_coef();
        out.betas[idx + 1] = out.betas[idx + 1] + lam;
        rem = rem - lam * fam.members[idx];
        if (!rem.is_constant() && !(rem.leading_atom() < top))
            throw NotInSpan("cancellation failed for " + e.str());
    }
    out.betas[0] = rem.constant();
    for (size_t i = m; i >= 1; --i)
        if (!exact_zero(out.betas[i])) {
            out.degree = i;
            break;
        }
    out.coefficient = out.betas[out.degree];
    return out;
}

}  // namespace hergo
