#include "hergo/expsum_suite.hpp"

#include <algorithm>
#include <memory>

namespace hergo {

namespace {

HardyExpr P(const char* s) { return HardyExpr::parse(s); }

std::vector<ExpSumCase> oracle_sequences(CaseKind kind) {
    TaggedReal b = TaggedReal::sqrt_of(2);
    switch (kind) {
        case CaseKind::Generic:
            return {ExpSumCase::generic(P("sqrt(3)*x"), b, Rat(1, 3)), ExpSumCase::generic(P("sqrt(5)*x+1/3"), b, 0),
                    ExpSumCase::generic(P("sqrt(7)*x+1/4"), b, Rat(1, 5)),
                    ExpSumCase::generic(P("(1+sqrt(3))*x"), b, Rat(1, 2))};
        case CaseKind::CaseK:
            return {ExpSumCase::special(kind, 1, 0, P("x"), b, Rat(1, 5)),
                    ExpSumCase::special(kind, -2, 0, P("5*x"), b, 0),
                    ExpSumCase::special(kind, 2, 0, P("3*x+1/2"), b, Rat(1, 3)),
                    ExpSumCase::special(kind, 3, 0, P("x"), b, 0)};
        case CaseKind::CaseL:
            return {ExpSumCase::special(kind, 0, 3, P("x+1/2"), b, Rat(1, 7)),
                    ExpSumCase::special(kind, 0, 2, P("3*x+1"), b, 0),
                    ExpSumCase::special(kind, 0, -3, P("2*x"), b, Rat(1, 4)),
                    ExpSumCase::special(kind, 0, 5, P("x"), b, 0)};
        case CaseKind::CaseKL:
            return {ExpSumCase::special(kind, 1, 1, P("x"), b, 0), ExpSumCase::special(kind, -2, 3, P("2*x"), b, Rat(1, 4)),
                    ExpSumCase::special(kind, 1, 2, P("x"), b, Rat(1, 6)),
                    ExpSumCase::special(kind, 3, -1, P("x+1/3"), b, Rat(1, 2))};
        case CaseKind::Linear:
            return {ExpSumCase::linear(b), ExpSumCase::linear(TaggedReal::sqrt_of(3)),
                    ExpSumCase::linear(TaggedReal::quad(Rat(1, 2), Rat(1, 2), 5)),
                    ExpSumCase::linear(TaggedReal::sqrt_of(7))};
    }
    return {};
}

bool same_sequence(const ExpSumCase& a, const ExpSumCase& b) { return a.a == b.a && a.beta == b.beta && a.u == b.u; }

}  // namespace

std::string OracleTuple::label() const {
    return case_name(c.kind) + " a=" + c.a.str() + " beta=" + c.beta.str() + " u=" + c.u.str() + " q=" + rat_str(q) +
           " r=" + rat_str(r) + " s=" + s.str();
}

std::vector<OracleTuple> bundled_oracle_suite() {
    const std::vector<std::array<Rat, 3>> qrs = {{0, 0, Rat(1, 2)},
                                                 {1, 0, Rat(1, 3)},
                                                 {0, 1, Rat(-1, 4)},
                                                 {Rat(1, 2), Rat(1, 3), Rat(1, 6)},
                                                 {-1, Rat(1, 2), Rat(2, 3)}};
    std::vector<OracleTuple> out;
    for (auto kind : {CaseKind::Generic, CaseKind::CaseK, CaseKind::CaseL, CaseKind::CaseKL, CaseKind::Linear})
        for (auto& c : oracle_sequences(kind))
            for (auto& x : qrs) out.push_back({c, x[0], x[1], TaggedReal(x[2])});
    return out;
}

std::vector<OracleRow> run_oracle_suite(const std::vector<OracleTuple>& suite, int64_t N1, int64_t N2) {
    std::vector<OracleRow> rows;
    std::unique_ptr<BruteEngine> eng;
    const ExpSumCase* cur = nullptr;
    int64_t nmax = std::max(N1, N2);
    for (auto& tp : suite) {
        if (!cur || !same_sequence(*cur, tp.c)) {
            eng.reset();
            eng = std::make_unique<BruteEngine>(tp.c.a, tp.c.beta, tp.c.u, nmax);
            cur = &tp.c;
        }
        TaggedReal t = tp.t();
        ClosedValue cv = closed_A(tp.c, tp.q, tp.r, t, tp.s);
        auto b1 = eng->A(t, tp.s, N1), b2 = eng->A(t, tp.s, N2);
        OracleRow row;
        row.kind = tp.c.kind;
        row.label = tp.label();
        row.closed = cv.value;
        row.brute1 = b1.value;
        row.brute2 = b2.value;
        row.err1 = std::abs(cv.value - b1.value);
        row.err2 = std::abs(cv.value - b2.value);
        row.exact_zero = cv.exact_zero;
        row.fired = cv.fired;
        row.skipped = b2.skipped;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<OracleSummary> summarize_oracle(const std::vector<OracleRow>& rows, double tol, double ratio,
                                            int min_tuples) {
    std::vector<OracleSummary> out;
    for (auto kind : {CaseKind::Generic, CaseKind::CaseK, CaseKind::CaseL, CaseKind::CaseKL, CaseKind::Linear}) {
        OracleSummary s;
        s.kind = kind;
        for (auto& r : rows) {
            if (r.kind != kind) continue;
            ++s.tuples;
            s.max_err1 = std::max(s.max_err1, r.err1);
            s.sum_err1 += r.err1;
            s.sum_err2 += r.err2;
            if (r.err2 <= ratio * r.err1) ++s.ratio_pass;
        }
        if (s.tuples == 0) continue;
        s.aggregate_ratio = s.sum_err1 > 0 ? s.sum_err2 / s.sum_err1 : 0.0;
        s.pass = s.tuples >= min_tuples && s.max_err1 <= tol && s.aggregate_ratio <= ratio;
        out.push_back(s);
    }
    return out;
}

std::vector<ExpSumCase> vanishing_cases() {
    TaggedReal b = TaggedReal::sqrt_of(2);
    return {ExpSumCase::generic(P("sqrt(3)*x"), b, Rat(1, 3)),
            ExpSumCase::special(CaseKind::CaseK, 2, 0, P("x^2+x"), b, Rat(1, 5)),
            ExpSumCase::special(CaseKind::CaseL, 0, 3, P("x+1/2"), b, 0),
            ExpSumCase::special(CaseKind::CaseKL, 1, 1, P("x"), b, 0), ExpSumCase::linear(b)};
}

VanishingReport vanishing_enumeration(const ExpSumCase& c, int cmax, bool keep_labels) {
    VanishingReport rep;
    rep.kind = c.kind;
    const TaggedReal& beta = c.beta;
    auto visit = [&](const Rat& q, const Rat& r, const TaggedReal& s) {
        TaggedReal t = TaggedReal(q) + beta * (TaggedReal(r) + s);
        ClosedValue cv = closed_A(c, q, r, t, s);
        ++rep.points;
        bool fired = !cv.fired.empty();
        if (cv.exact_zero) ++rep.zeros;
        if (fired != cv.exact_zero) {
            ++rep.mismatches;
            if (rep.first_mismatches.size() < 5)
                rep.first_mismatches.push_back("q=" + rat_str(q) + " r=" + rat_str(r) + " s=" + s.str());
        }
        if ((std::abs(cv.value) < 1e-12) != cv.exact_zero) ++rep.numeric_mismatches;
        try {
            ZeroSetLabel lab = label_zero_set(beta, t, s, q, r, cv);
            if (lab.kind == ZeroSetKind::E3Candidate) ++rep.e3_candidates;
            if (keep_labels) rep.labels.push_back(lab);
        } catch (const std::logic_error&) {
            ++rep.e3_violations;
        }
    };
    // q, r with lcm of denominators exactly c, so each pair is visited once
    for (int64_t cc = 1; cc <= cmax; ++cc) {
        std::vector<Rat> vals;
        for (int64_t j = -3 * cc; j <= 3 * cc; ++j) vals.push_back(Rat(j, cc));
        TaggedReal inv_beta = TaggedReal(1) / beta;
        for (auto& q : vals)
            for (auto& r : vals) {
                if (lcm64(rat_den64(q), rat_den64(r)) != cc) continue;
                for (int64_t j = 0; j < 12; ++j) visit(q, r, TaggedReal(Rat(j, 12)));
                for (int64_t m : {-2, -1, 1, 2}) visit(q, r, TaggedReal(m) * inv_beta - TaggedReal(r));
            }
    }
    return rep;
}

std::vector<TaggedReal> bundled_gammas() {
    auto s2 = TaggedReal::sqrt_of(2);
    return {TaggedReal(3),
            TaggedReal(-2),
            TaggedReal(Rat(1, 2)),
            TaggedReal(Rat(-1, 3)),
            TaggedReal(Rat(2, 5)),
            TaggedReal::quad(0, Rat(1, 2), 2),
            TaggedReal::quad(0, Rat(3, 4), 2),
            TaggedReal(1) + s2,
            TaggedReal::quad(Rat(1, 3), Rat(1, 3), 2),
            s2 - TaggedReal(Rat(1, 2))};
}

std::string branch_name(ScalingBranch b) {
    switch (b) {
        case ScalingBranch::IntegerGamma: return "IntegerGamma";
        case ScalingBranch::RationalGamma: return "RationalGamma";
        case ScalingBranch::RationalBetaGamma: return "RationalBetaGamma";
        case ScalingBranch::Irrational: return "Irrational";
    }
    return "?";
}

std::vector<ScalingRow> run_scaling_suite(const TaggedReal& beta, const std::vector<TaggedReal>& gammas, int64_t N) {
    std::vector<ScalingRow> out;
    for (auto& g : gammas) {
        ScalingConstant sc = scaling_constant(beta, g);
        ScalingRow row;
        row.gamma = g;
        row.branch = sc.branch;
        row.c = sc.c;
        row.C = sc.C;
        row.brute = scaling_brute(beta, g, N);
        row.identity_err = std::abs(sc.c * sc.C - sc.integral);
        row.brute_err = std::abs(sc.C - row.brute);
        out.push_back(row);
    }
    return out;
}

}  // namespace hergo
