#include "hergo/expsums.hpp"

#include <algorithm>
#include <map>
#include <numbers>

#include "hergo/reduce.hpp"

namespace hergo {

namespace {

const cplx kI(0.0, 1.0);
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_nonzero_integer(const TaggedReal& x) { return x.is_integer() && !x.is_zero(); }

bool is_polynomial(const HardyExpr& a) {
    return std::all_of(a.terms().begin(), a.terms().end(),
                       [](const HardyTerm& t) { return t.atom.is_integer_monomial(); });
}

// p in Z[x] + R, nonconstant
bool is_integer_poly_plus_const(const HardyExpr& p) {
    if (p.is_constant()) return false;
    for (auto& t : p.terms())
        if (!t.atom.is_integer_monomial() || !t.coef.is_integer()) return false;
    return true;
}

TaggedReal poly_at(const HardyExpr& p, int64_t j) {
    TaggedReal v = p.constant();
    for (auto& t : p.terms()) {
        Rat pw = 1;
        for (int64_t e = 0; e < rat_num64(t.atom.power); ++e) pw *= j;
        v = v + t.coef * TaggedReal(pw);
    }
    return v;
}

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// coordinates of an exact real in the Q-basis {sqrt(d)} (d squarefree, d = 1 for rationals)
std::map<int64_t, Rat> mq_coords(const TaggedReal& x) {
    if (!x.is_exact()) throw Undecidable("flagged coefficient " + x.str());
    std::map<int64_t, Rat> m;
    if (x.a() != 0) m[1] = x.a();
    if (x.kind() == TaggedReal::Kind::Quad) m[x.d()] = x.b();
    return m;
}
std::map<int64_t, Rat> mq_mul(const std::map<int64_t, Rat>& x, const std::map<int64_t, Rat>& y) {
    std::map<int64_t, Rat> out;
    for (auto& [d1, c1] : x)
        for (auto& [d2, c2] : y) {
            int64_t g = gcd64(d1, d2);
            // sqrt(d1) sqrt(d2) = g sqrt(d1 d2 / g^2)
            out[(d1 / g) * (d2 / g)] += c1 * c2 * g;
        }
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

// reliable zero test for an exact TaggedReal
bool exact_is_zero(const TaggedReal& x) {
    if (!x.is_exact()) throw Undecidable("cannot decide whether " + x.str() + " vanishes");
    return x.is_zero();
}

int64_t lcm_den(const Rat& q, const Rat& r) { return lcm64(rat_den64(q), rat_den64(r)); }

// factor = scale * sum; the factor vanishes iff the exact sum does
struct Factor {
    CycloSum sum;
    cplx scale = 1.0;
};

struct Evaluation {
    std::vector<Factor> factors;
    const TaggedReal* beta;

    ClosedValue finish(std::vector<int> fired, std::string formula) const {
        ClosedValue cv;
        cv.value = 1.0;
        cv.exact_zero = false;
        DD b = beta->to_dd();
        for (auto& f : factors) {
            cv.value *= f.scale * f.sum.value_dd(b);
            if (f.sum.is_zero()) cv.exact_zero = true;
        }
        if (cv.exact_zero) cv.value = 0.0;
        cv.fired = std::move(fired);
        cv.formula = std::move(formula);
        return cv;
    }
};

// 1_Z(q) as the character average (1/c) sum_{i<c} e(q i)
Factor indicator_Z(const Rat& q) {
    Factor f;
    int64_t c = rat_den64(q);
    for (int64_t i = 0; i < c; ++i) f.sum.add(Rat(1, c), Rat(q * i), 0);
    return f;
}

// 1_{x=0} + 1_{R\Z}(x) (e(x)-1)/(2 pi i x)
Factor interval_factor(const TaggedReal& x, const TaggedReal& beta) {
    Factor f;
    if (exact_is_zero(x)) {
        f.sum.add(Rat(1), Rat(0), 0);
        return f;
    }
    f.sum.add_phase(TaggedReal(1), x, beta);
    f.sum.add(Rat(-1), Rat(0), 0);
    f.scale = 1.0 / (kTwoPi * kI * x.to_double());
    return f;
}

Factor phase_factor(const TaggedReal& x) {
    Factor f;
    f.sum.add(Rat(1), Rat(0), 0);
    f.scale = e_of(x);
    return f;
}

void require_irrational_beta(const TaggedReal& beta) {
    if (beta.kind() != TaggedReal::Kind::Quad)
        throw std::invalid_argument("beta must be a quadratic irrational for exact exponential-sum paths");
}

}  // namespace

std::string case_name(CaseKind k) {
    switch (k) {
        case CaseKind::Generic: return "Generic";
        case CaseKind::CaseK: return "CaseK";
        case CaseKind::CaseL: return "CaseL";
        case CaseKind::CaseKL: return "CaseKL";
        case CaseKind::Linear: return "Linear";
    }
    return "?";
}

CaseKind case_from_name(const std::string& s) {
    for (auto k : {CaseKind::Generic, CaseKind::CaseK, CaseKind::CaseL, CaseKind::CaseKL, CaseKind::Linear})
        if (case_name(k) == s) return k;
    throw std::invalid_argument("unknown case " + s);
}

cplx e_of(const TaggedReal& x) { return expi(x.to_dd()); }

cplx unit_integral(const TaggedReal& theta) {
    if (theta.is_exact() && theta.is_zero()) return 1.0;
    if (theta.is_integer()) return 0.0;
    return (e_of(theta) - 1.0) / (kTwoPi * kI * theta.to_double());
}

// ---- validation ----

void ExpSumCase::validate() {
    if (beta.rational_or_throw()) throw CaseMismatch("beta must be irrational");
    if (a.is_constant()) throw CaseMismatch("a must be nonconstant");
    auto fail = [&](const std::string& why) { throw CaseMismatch(case_name(kind) + ": " + why); };
    switch (kind) {
        case CaseKind::Linear:
            if (!(a == HardyExpr::x())) fail("a must equal x");
            if (!exact_is_zero(u)) fail("u must be 0");
            k = 0;
            l = 1;
            p = HardyExpr::x();
            return;
        case CaseKind::Generic: {
            if (!is_polynomial(a)) {
                if (!stays_log_away_from_R(a))
                    fail("a is neither in R[x] nor logarithmically away from R[x]");
                return;  // (k beta + l) a + k u then stays away from Q[x] + R as well
            }
            // (k beta + l) alpha_m in Q for every m >= 1 must force k = l = 0
            auto bc = mq_coords(beta);
            std::vector<std::array<Rat, 2>> rows;
            for (auto& t : a.terms()) {
                auto al = mq_coords(t.coef);
                auto ba = mq_mul(bc, al);
                std::map<int64_t, std::array<Rat, 2>> byd;
                for (auto& [d, v] : ba)
                    if (d != 1) byd[d][0] = v;
                for (auto& [d, v] : al)
                    if (d != 1) byd[d][1] = v;
                for (auto& [d, row] : byd) rows.push_back(row);
            }
            for (size_t i = 0; i < rows.size(); ++i)
                for (size_t j = i + 1; j < rows.size(); ++j)
                    if (rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0] != 0) return;
            fail("a has the special form (p - k u)/(k beta + l) for some (k, l) != 0");
            return;
        }
        case CaseKind::CaseK:
        case CaseKind::CaseL:
        case CaseKind::CaseKL: {
            if (kind == CaseKind::CaseK && (k == 0 || l != 0)) fail("needs k != 0, l = 0");
            if (kind == CaseKind::CaseL && (k != 0 || l == 0)) fail("needs k = 0, l != 0");
            if (kind == CaseKind::CaseKL && (k == 0 || l == 0)) fail("needs k, l != 0");
            if (!is_integer_poly_plus_const(p)) fail("p must be a nonconstant element of Z[x] + R");
            HardyExpr lhs = (TaggedReal(k) * beta + TaggedReal(l)) * a;
            HardyExpr rhs = p - HardyExpr(TaggedReal(k) * u);
            HardyExpr diff = lhs - rhs;
            bool ok = diff.is_constant() && exact_is_zero(diff.constant());
            if (!ok) fail("(k beta + l) a != p - k u");
            if (kind == CaseKind::CaseKL && l < 0) {
                k = -k;
                l = -l;
                p = -p;
            }
            return;
        }
    }
}

ExpSumCase ExpSumCase::generic(const HardyExpr& a, const TaggedReal& beta, const TaggedReal& u) {
    ExpSumCase c;
    c.kind = CaseKind::Generic;
    c.a = a;
    c.beta = beta;
    c.u = u;
    c.validate();
    return c;
}

ExpSumCase ExpSumCase::special(CaseKind kind, int64_t k, int64_t l, const HardyExpr& p, const TaggedReal& beta,
                               const TaggedReal& u) {
    ExpSumCase c;
    c.kind = kind;
    c.k = k;
    c.l = l;
    c.p = p;
    c.beta = beta;
    c.u = u;
    TaggedReal den = TaggedReal(k) * beta + TaggedReal(l);
    c.a = (TaggedReal(1) / den) * (p - HardyExpr(TaggedReal(k) * u));
    c.validate();
    return c;
}

ExpSumCase ExpSumCase::linear(const TaggedReal& beta) {
    ExpSumCase c;
    c.kind = CaseKind::Linear;
    c.a = HardyExpr::x();
    c.beta = beta;
    c.u = TaggedReal(0);
    c.validate();
    return c;
}

// ---- brute force ----

BruteEngine::BruteEngine(const HardyExpr& a, const TaggedReal& beta, const TaggedReal& u, int64_t Nmax)
    : u_(u), nmax_(Nmax), fa_(Nmax), fb_(Nmax), ok_(Nmax, 1) {
    SequenceEvaluator ea(a), eb(beta * a + HardyExpr(u));
    int64_t nb = (Nmax + kReduceBlock - 1) / kReduceBlock;
    std::vector<FloorStats> st(nb);
    parallel_blocks(nb, default_threads(), [&](int64_t b) {
        int64_t lo = b * kReduceBlock, hi = std::min(Nmax, lo + kReduceBlock);
        for (int64_t i = lo; i < hi; ++i) {
            auto x = ea.floor_at(i + 1, &st[b]);
            auto y = eb.floor_at(i + 1, &st[b]);
            if (!x || !y) {
                ok_[i] = 0;
                continue;
            }
            fa_[i] = *x;
            fb_[i] = *y;
        }
    });
    for (auto& s : st) {
        stats_.exact += s.exact;
        stats_.dd += s.dd;
        stats_.escalated += s.escalated;
        stats_.ambiguous += s.ambiguous;
    }
    for (int64_t i = 0; i < Nmax; ++i)
        if (!ok_[i]) skip_prefix_.push_back(i);
}

BruteResult BruteEngine::A(const TaggedReal& t, const TaggedReal& s, int64_t N, int threads) const {
    if (N > nmax_) throw std::out_of_range("N exceeds the precomputed range");
    if (threads <= 0) threads = default_threads();
    BruteResult res;
    res.skipped = std::lower_bound(skip_prefix_.begin(), skip_prefix_.end(), N) - skip_prefix_.begin();
    res.used = N - res.skipped;
    cplx sum;
    bool rational = t.kind() == TaggedReal::Kind::Rational && s.kind() == TaggedReal::Kind::Rational;
    int64_t L = 0;
    if (rational) {
        int64_t dt = rat_den64(t.a()), ds = rat_den64(s.a());
        L = lcm64(dt, ds);
        if (L > (1 << 20)) rational = false;
    }
    if (rational) {
        // phase index in Z/L, exact
        int64_t pt = mod64(rat_num64(t.a()) * (L / rat_den64(t.a())), L);
        int64_t ps = mod64(rat_num64(s.a()) * (L / rat_den64(s.a())), L);
        std::vector<cplx> table(L);
        for (int64_t j = 0; j < L; ++j) table[j] = expi_rat(Rat(j, L));
        sum = deterministic_sum<cplx>(
            0, N,
            [&](int64_t i) -> cplx {
                if (!ok_[i]) return 0.0;
                __int128 v = (__int128)fa_[i] * pt - (__int128)fb_[i] * ps;
                int64_t idx = (int64_t)(v % L);
                if (idx < 0) idx += L;
                return table[idx];
            },
            threads);
    } else {
        DD td = t.to_dd(), sd = s.to_dd();
        sum = deterministic_sum<cplx>(
            0, N,
            [&](int64_t i) -> cplx {
                if (!ok_[i]) return 0.0;
                DD ph = frac(DD::from_int(fa_[i]) * td) - frac(DD::from_int(fb_[i]) * sd);
                double x = kTwoPi * ph.to_double();
                return {std::cos(x), std::sin(x)};
            },
            threads);
    }
    res.value = res.used > 0 ? sum / static_cast<double>(res.used) : cplx(0.0);
    res.value *= e_of(u_ * s);
    return res;
}

BruteResult brute_A(const HardyExpr& a, const TaggedReal& beta, const TaggedReal& u, const TaggedReal& t,
                    const TaggedReal& s, int64_t N) {
    return BruteEngine(a, beta, u, N).A(t, s, N);
}

BruteResult brute_B(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s, int64_t N) {
    if (beta.rational_or_throw()) throw std::invalid_argument("brute_B needs irrational beta");
    return BruteEngine(HardyExpr::x(), beta, TaggedReal(0), N).A(t, s, N);
}

// ---- closed forms ----

std::optional<std::pair<Rat, Rat>> q_dependence(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s) {
    if (!beta.is_exact() || !t.is_exact() || !s.is_exact())
        throw QDependenceUndecidable("flagged inputs cannot certify membership in Q + beta Q");
    require_irrational_beta(beta);
    // t - beta s in the Q-basis {sqrt(d)}; it lies in Q + beta Q iff only the keys 1 and d_beta occur
    auto x = mq_coords(t);
    for (auto& [d, v] : mq_mul(mq_coords(beta), mq_coords(s))) x[d] -= v;
    Rat x0 = 0, x1 = 0;
    for (auto& [d, v] : x) {
        if (v == 0) continue;
        if (d == 1)
            x0 = v;
        else if (d == beta.d())
            x1 = v;
        else
            return std::nullopt;
    }
    Rat r = x1 / beta.b();
    Rat q = x0 - r * beta.a();
    return std::pair<Rat, Rat>{q, r};
}

ClosedValue generic_formula(const Rat& q, const Rat& r, const TaggedReal& t, const TaggedReal& s,
                            const TaggedReal& u, const TaggedReal& beta) {
    Evaluation ev{{}, &beta};
    ev.factors.push_back(phase_factor(-TaggedReal(r) * u));
    ev.factors.push_back(indicator_Z(q));
    ev.factors.push_back(interval_factor(TaggedReal(q) - t, beta));
    ev.factors.push_back(indicator_Z(r));
    ev.factors.push_back(interval_factor(TaggedReal(r) + s, beta));
    std::vector<int> fired;
    if (!rat_is_integer(q)) fired.push_back(1);
    if (is_nonzero_integer(TaggedReal(q) - t)) fired.push_back(2);
    if (!rat_is_integer(r)) fired.push_back(3);
    if (is_nonzero_integer(TaggedReal(r) + s)) fired.push_back(4);
    return ev.finish(fired, "e(-ru) 1_Z(q) I(q-t) 1_Z(r) I(r+s)");
}

ClosedValue caseK_formula(int64_t k, const HardyExpr& p, const Rat& q, const Rat& r, const TaggedReal& t,
                          const TaggedReal& s, const TaggedReal& u, const TaggedReal& beta) {
    int64_t c = lcm_den(q, r), n = c * std::abs(k);
    Factor S;
    for (int64_t j = 1; j <= n; ++j) {
        TaggedReal y = poly_at(p, j) / TaggedReal(k);
        TaggedReal fr = y - TaggedReal(Rat(y.floor_exact()));
        S.sum.add_phase(TaggedReal(Rat(1, n)), TaggedReal(r) * y + fr * s, beta);
    }
    bool s_zero = S.sum.is_zero();
    Evaluation ev{{}, &beta};
    ev.factors.push_back(phase_factor(-TaggedReal(r) * u));
    ev.factors.push_back(S);
    ev.factors.push_back(indicator_Z(q));
    ev.factors.push_back(interval_factor(TaggedReal(q) - t, beta));
    std::vector<int> fired;
    if (s_zero) fired.push_back(1);
    if (!rat_is_integer(q)) fired.push_back(2);
    if (is_nonzero_integer(TaggedReal(q) - t)) fired.push_back(3);
    return ev.finish(fired, "e(-ru) E_j e(r p(j)/k + {p(j)/k} s) 1_Z(q) I(q-t)");
}

ClosedValue caseL_formula(int64_t l, const HardyExpr& p, const Rat& q, const Rat& r, const TaggedReal& t,
                          const TaggedReal& s, const TaggedReal& u, const TaggedReal& beta) {
    int64_t c = lcm_den(q, r), n = c * std::abs(l);
    Factor S;
    for (int64_t j = 1; j <= n; ++j) {
        TaggedReal y = poly_at(p, j) / TaggedReal(l);
        TaggedReal fr = y - TaggedReal(Rat(y.floor_exact()));
        S.sum.add_phase(TaggedReal(Rat(1, n)), TaggedReal(q) * y - fr * t, beta);
    }
    bool s_zero = S.sum.is_zero();
    Evaluation ev{{}, &beta};
    ev.factors.push_back(phase_factor(-TaggedReal(r) * u));
    ev.factors.push_back(S);
    ev.factors.push_back(indicator_Z(r));
    ev.factors.push_back(interval_factor(TaggedReal(r) + s, beta));
    std::vector<int> fired;
    if (s_zero) fired.push_back(1);
    if (!rat_is_integer(r)) fired.push_back(2);
    if (is_nonzero_integer(TaggedReal(r) + s)) fired.push_back(3);
    return ev.finish(fired, "e(-ru) E_j e(q p(j)/l - {p(j)/l} t) 1_Z(r) I(r+s)");
}

ClosedValue caseKL_formula(int64_t k, int64_t l, const HardyExpr& p, const Rat& q, const Rat& r,
                           const TaggedReal& t, const TaggedReal& s, const TaggedReal& u, const TaggedReal& beta) {
    if (k == 0 || l <= 0) throw std::invalid_argument("CaseKL formula needs k != 0 and l > 0");
    int64_t c = lcm_den(q, r);
    int64_t nj = c * std::abs(k), njp = c * std::abs(k) * l;
    int64_t sg = k > 0 ? 1 : -1;
    TaggedReal kk(k), rs = TaggedReal(r) + s;
    TaggedReal w = (kk * (TaggedReal(q) - t) - TaggedReal(l) * rs) / TaggedReal(std::abs(k * l));
    bool w_zero = exact_is_zero(w);
    Factor S;
    TaggedReal weight(Rat(1, nj * njp));
    for (int64_t j = 1; j <= nj; ++j) {
        TaggedReal pj = poly_at(p, j);
        TaggedReal ph1 = rs * pj / kk;
        for (int64_t jp = 0; jp < njp; ++jp) {
            TaggedReal y = (pj - TaggedReal(sg * jp)) / kk;
            TaggedReal fl(Rat(y.floor_exact()));
            TaggedReal x = TaggedReal(std::abs(k)) * (y - fl);
            TaggedReal m = compare(x, TaggedReal(1)) < 0 ? x : TaggedReal(1);
            TaggedReal b = TaggedReal(floor_div(sg * (jp + (k < 0 ? 1 : 0)), l)) * t - fl * s;
            TaggedReal ph = ph1 + TaggedReal(jp) * w + b;
            if (w_zero) {
                // e(s) + m (1 - e(s))
                S.sum.add_phase(weight * (TaggedReal(1) - m), ph + s, beta);
                S.sum.add_phase(weight * m, ph, beta);
            } else {
                // e(s)(e(w) - 1) + (1 - e(s))(e(w m) - 1) = e(s+w) + e(wm) - 1 - e(s+wm)
                S.sum.add_phase(weight, ph + s + w, beta);
                S.sum.add_phase(weight, ph + w * m, beta);
                S.sum.add_phase(-weight, ph, beta);
                S.sum.add_phase(-weight, ph + s + w * m, beta);
            }
        }
    }
    if (!w_zero) S.scale = 1.0 / (kTwoPi * kI * w.to_double());
    bool s_zero = S.sum.is_zero();
    Evaluation ev{{}, &beta};
    ev.factors.push_back(phase_factor(-TaggedReal(r) * u));
    ev.factors.push_back(S);
    std::vector<int> fired;
    if (w_zero && s_zero) fired.push_back(1);
    if (!w_zero && s_zero) fired.push_back(2);
    return ev.finish(fired, w_zero ? "e(-ru) E_j E_j' e(...) (e(s) + min(x,1)(1-e(s)))"
                                   : "e(-ru) E_j E_j' e(...) [...]/(2 pi i w)");
}

ClosedValue linear_formula(const Rat& q, const Rat& r, const TaggedReal& s, const TaggedReal& beta) {
    Evaluation ev{{}, &beta};
    ev.factors.push_back(indicator_Z(q));
    ev.factors.push_back(indicator_Z(r));
    ev.factors.push_back(interval_factor(TaggedReal(r) + s, beta));
    std::vector<int> fired;
    if (!rat_is_integer(q)) fired.push_back(1);
    if (!rat_is_integer(r)) fired.push_back(2);
    if (is_nonzero_integer(TaggedReal(r) + s)) fired.push_back(3);
    return ev.finish(fired, "1_Z(q) 1_Z(r) I(r+s)");
}

ClosedValue closed_A(const ExpSumCase& c, const Rat& q, const Rat& r, const TaggedReal& t, const TaggedReal& s) {
    require_irrational_beta(c.beta);
    TaggedReal diff = t - c.beta * s - TaggedReal(q) - c.beta * TaggedReal(r);
    if (!diff.is_exact()) throw QDependenceUndecidable("cannot certify t - beta s = q + beta r");
    if (!diff.is_zero()) throw QDependenceInvalid("t - beta s != q + beta r (difference " + diff.str() + ")");
    switch (c.kind) {
        case CaseKind::Generic: return generic_formula(q, r, t, s, c.u, c.beta);
        case CaseKind::CaseK: return caseK_formula(c.k, c.p, q, r, t, s, c.u, c.beta);
        case CaseKind::CaseL: return caseL_formula(c.l, c.p, q, r, t, s, c.u, c.beta);
        case CaseKind::CaseKL: return caseKL_formula(c.k, c.l, c.p, q, r, t, s, c.u, c.beta);
        case CaseKind::Linear: return linear_formula(q, r, s, c.beta);
    }
    throw std::logic_error("unreachable");
}

ClosedValue closed_B(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s) {
    auto dep = q_dependence(beta, t, s);
    if (!dep) {
        ClosedValue cv;
        cv.value = 0.0;
        cv.exact_zero = true;
        cv.formula = "t - beta s, beta, 1 are Q-independent";
        return cv;
    }
    return linear_formula(dep->first, dep->second, s, beta);
}

cplx kl_witness_sum(int64_t k, int64_t l, const TaggedReal& beta) {
    cplx s = 0.0;
    for (int64_t j = 0; j < l; ++j) s += e_of(TaggedReal(j * std::abs(k)) * beta);
    return s / static_cast<double>(l);
}

cplx kl_witness_value(int64_t k, int64_t l, const TaggedReal& beta) {
    cplx num = e_of(TaggedReal(std::abs(k * l)) * beta) - 1.0;
    cplx den = static_cast<double>(l) * (e_of(TaggedReal(std::abs(k)) * beta) - 1.0);
    return num / den;
}

// ---- zero sets ----

std::string ZeroSetLabel::str() const {
    switch (kind) {
        case ZeroSetKind::E1: return "E1";
        case ZeroSetKind::E2: return "E2";
        case ZeroSetKind::E3Candidate: return "E3Candidate(" + gamma->str() + ")";
    }
    return "?";
}

ZeroSetLabel classify_zero_set(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s,
                               const ExpSumCase& c) {
    auto dep = q_dependence(beta, t, s);
    if (!dep) throw QDependenceInvalid("no closed form for A at Q-independent t - beta s");
    ClosedValue a = closed_A(c, dep->first, dep->second, t, s);
    return label_zero_set(beta, t, s, dep->first, dep->second, a);
}

ZeroSetLabel label_zero_set(const TaggedReal& beta, const TaggedReal& t, const TaggedReal& s, const Rat& q,
                            const Rat& r, const ClosedValue& A) {
    if (!A.exact_zero) return {ZeroSetKind::E2, std::nullopt};
    ClosedValue b = linear_formula(q, r, s, beta);
    if (b.exact_zero) return {ZeroSetKind::E1, std::nullopt};
    TaggedReal gamma = TaggedReal(r) + s;
    TaggedReal d1 = t - beta * gamma, d2 = s - gamma;
    if (!d1.is_integer() || !d2.is_integer() || gamma.is_zero())
        throw std::logic_error("E3 candidate violates (t, s) = (beta gamma, gamma) mod Z^2");
    return {ZeroSetKind::E3Candidate, gamma};
}

// ---- scaling constants ----

ScalingConstant scaling_constant(const TaggedReal& beta, const TaggedReal& gamma) {
    if (gamma.is_exact() && gamma.is_zero()) throw std::invalid_argument("gamma must be nonzero");
    if (beta.rational_or_throw()) throw std::invalid_argument("beta must be irrational");
    ScalingConstant sc;
    sc.integral = unit_integral(gamma);
    TaggedReal bg = beta * gamma;
    if (gamma.is_integer()) {
        sc.branch = ScalingBranch::IntegerGamma;
        sc.C = unit_integral(-bg);
        sc.c = 0.0;
        return sc;
    }
    if (gamma.rational_or_throw()) {
        // gamma = -p/q
        sc.branch = ScalingBranch::RationalGamma;
        Rat g = gamma.a();
        BigInt p = -numerator(g), q = denominator(g);
        int64_t ap = rat_num64(Rat(p < 0 ? BigInt(-p) : p));
        cplx E = 0.0;
        for (int64_t m = 1; m <= ap; ++m) E += expi_rat(rat_frac(Rat(BigInt(q * m)) / Rat(p)) * (Rat(p) / Rat(q)));
        E /= static_cast<double>(ap);
        sc.C = unit_integral(-bg) * E;
    } else if (bg.rational_or_throw()) {
        // beta gamma = p/q
        sc.branch = ScalingBranch::RationalBetaGamma;
        Rat g = bg.a();
        BigInt p = numerator(g), q = denominator(g);
        int64_t ap = rat_num64(Rat(p < 0 ? BigInt(-p) : p));
        cplx E = 0.0;
        for (int64_t n = 1; n <= ap; ++n) E += expi_rat(-rat_frac(Rat(BigInt(q * n)) / Rat(p)) * (Rat(p) / Rat(q)));
        E /= static_cast<double>(ap);
        sc.C = unit_integral(-gamma) * E;
    } else {
        sc.branch = ScalingBranch::Irrational;
        sc.C = unit_integral(-bg) * unit_integral(-gamma);
    }
    sc.c = sc.integral / sc.C;
    return sc;
}

namespace {
// E_{n<=N} e(floor(n kappa) lambda)
cplx floor_phase_average(const TaggedReal& kappa, const TaggedReal& lambda, int64_t N) {
    SequenceEvaluator ev(HardyExpr::monomial(kappa, 1));
    DD ld = lambda.to_dd();
    int64_t used = 0;
    cplx s = 0.0;
    for (int64_t n = 1; n <= N; ++n) {
        auto f = ev.floor_at(n);
        if (!f) continue;
        ++used;
        s += expi(frac(DD::from_int(*f) * ld));
    }
    return s / static_cast<double>(used);
}
}  // namespace

cplx scaling_brute(const TaggedReal& beta, const TaggedReal& gamma, int64_t N) {
    TaggedReal bg = beta * gamma;
    return floor_phase_average(TaggedReal(1) / bg, bg, N) * floor_phase_average(-(TaggedReal(1) / gamma), gamma, N);
}

}  // namespace hergo
