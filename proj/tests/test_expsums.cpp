#include <numbers>
#include <random>

#include "doctest.h"
#include "hergo/expsum_suite.hpp"

using namespace hergo;

namespace {

const TaggedReal kB = TaggedReal::sqrt_of(2);
const cplx kTwoIOverPi(0.0, 2.0 / std::numbers::pi);

HardyExpr P(const char* s) { return HardyExpr::parse(s); }

TaggedReal t_of(const TaggedReal& beta, const Rat& q, const Rat& r, const TaggedReal& s) {
    return TaggedReal(q) + beta * (TaggedReal(r) + s);
}

}  // namespace

TEST_CASE("brute sums at the trivial frequency") {
    for (const char* a : {"x", "sqrt(3)*x^2", "x^(3/2)", "x*log(x)"}) {
        auto r = brute_A(P(a), kB, Rat(1, 3), 0, 0, 2000);
        CHECK(std::abs(r.value - 1.0) < 1e-12);
    }
    CHECK(std::abs(brute_B(kB, 0, 0, 1000).value - 1.0) < 1e-12);
    CHECK(std::abs(brute_B(kB, Rat(1, 2), 0, 1000000).value) < 1e-9);
}

TEST_CASE("brute sums against closed forms") {
    // a = x, t = 0, s = 1/2: t - beta s = -beta/2, so r = -1/2 and the corollary gives 0
    auto b = brute_A(P("x"), kB, 0, 0, Rat(1, 2), 1000000);
    auto cb = closed_B(kB, 0, Rat(1, 2));
    CHECK(cb.exact_zero);
    CHECK(std::abs(b.value - cb.value) < 0.05);

    auto z = brute_A(P("x^(3/2)"), kB, 0, Rat(1, 3), 0, 1000000);
    CHECK(std::abs(z.value) < 0.05);
    CHECK(closed_A(ExpSumCase::generic(P("x^(3/2)"), kB, 0), Rat(1, 3), 0, Rat(1, 3), 0).exact_zero);

    // t = {beta/2}, s = 1/2 gives q = r = 0 and the value 2i/pi
    TaggedReal t = kB / TaggedReal(2);
    auto bb = brute_B(kB, t, Rat(1, 2), 1000000);
    CHECK(std::abs(bb.value - kTwoIOverPi) < 0.05);
    CHECK(std::abs(closed_B(kB, t, Rat(1, 2)).value - kTwoIOverPi) < 1e-12);
}

TEST_CASE("closed forms match frozen independent brute force") {
    // tests/oracles/expsum_brute.py, N = 2e7
    struct Row {
        ExpSumCase c;
        Rat q, r, s;
        cplx expect;
    };
    std::vector<Row> rows = {
        {ExpSumCase::generic(P("sqrt(3)*x"), kB, Rat(1, 3)), 0, 0, Rat(1, 2), {0.181443, -0.138118}},
        {ExpSumCase::special(CaseKind::CaseK, 1, 0, P("x"), kB, Rat(1, 5)), 0, 0, Rat(1, 2), {-0.216954, -0.285008}},
        {ExpSumCase::special(CaseKind::CaseL, 0, 3, P("x+1/2"), kB, Rat(1, 7)), 1, 0, Rat(1, 3), {0.525754, -0.243521}},
        {ExpSumCase::special(CaseKind::CaseKL, 1, 1, P("x"), kB, 0), 0, 0, Rat(1, 2), {-0.127089, 0.096743}},
        {ExpSumCase::special(CaseKind::CaseKL, -2, 3, P("2*x"), kB, Rat(1, 4)), 0, 0, Rat(1, 2), {0.221124, -0.168324}},
        {ExpSumCase::linear(kB), 1, 1, Rat(1, 3), {0.103374, 0.179049}},
    };
    for (auto& row : rows) {
        TaggedReal s(row.s);
        auto cv = closed_A(row.c, row.q, row.r, t_of(kB, row.q, row.r, s), s);
        CHECK(std::abs(cv.value - row.expect) < 2e-5);
        CHECK(!cv.exact_zero);
    }
}

TEST_CASE("closed_A examples") {
    auto g = ExpSumCase::generic(P("sqrt(3)*x"), kB, 0);
    auto one = closed_A(g, 0, 0, 0, 0);
    CHECK(std::abs(one.value - 1.0) < 1e-15);
    // q = 0, t = 1/2, r = s = 0 violates t - beta s = q + beta r
    CHECK_THROWS_AS(closed_A(g, 0, 0, Rat(1, 2), 0), QDependenceInvalid);
    auto raw = generic_formula(0, 0, Rat(1, 2), 0, 0, kB);
    CHECK(std::abs(raw.value - (-kTwoIOverPi)) < 1e-15);

    // the witness s = -|kl| - r of the countability argument
    for (auto [k, l] : std::vector<std::pair<int, int>>{{1, 1}, {2, 3}, {-2, 3}, {3, 1}}) {
        auto c = ExpSumCase::special(CaseKind::CaseKL, k, l, P("x"), kB, 0);
        for (Rat r : {Rat(0), Rat(1), Rat(-2)}) {
            TaggedReal s(Rat(-std::abs(k * l)) - r);
            Rat q = 1;
            auto cv = closed_A(c, q, r, t_of(kB, q, r, s), s);
            CHECK(!cv.exact_zero);
        }
        CHECK(std::abs(kl_witness_sum(k, l, kB) - kl_witness_value(k, l, kB)) < 1e-12);
        CHECK(std::abs(kl_witness_value(k, l, kB)) > 1e-3);
    }
}

TEST_CASE("closed_B examples") {
    auto v = closed_B(kB, t_of(kB, 2, 1, TaggedReal(-1)), -1);
    CHECK(std::abs(v.value - 1.0) < 1e-15);
    auto h = closed_B(kB, t_of(kB, Rat(1, 2), 0, 0), 0);
    CHECK(h.exact_zero);
    CHECK(h.fired == std::vector<int>{1});
    CHECK(std::abs(closed_B(kB, t_of(kB, 0, 0, Rat(1, 2)), Rat(1, 2)).value - kTwoIOverPi) < 1e-15);
    // Q-independent: t in Q(sqrt 3)
    auto ind = closed_B(kB, TaggedReal::sqrt_of(3), Rat(1, 5));
    CHECK(ind.exact_zero);
    CHECK_THROWS_AS(closed_B(kB, TaggedReal::flagged(DD(0.3), true), 0), QDependenceUndecidable);
}

TEST_CASE("Q-independent frequencies give vanishing B") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 12);
    BruteEngine eng(P("x"), kB, 0, 1000000);
    int done = 0;
    while (done < 10) {
        TaggedReal t = TaggedReal::quad(Rat(num(rng), den(rng)), Rat(num(rng), den(rng)), 3);
        TaggedReal s(Rat(num(rng), den(rng)));
        if (q_dependence(kB, t, s)) continue;
        CHECK(std::abs(eng.A(t, s, 1000000).value) <= 0.05);
        CHECK(closed_B(kB, t, s).exact_zero);
        ++done;
    }
}

TEST_CASE("case validation") {
    CHECK_THROWS_AS(ExpSumCase::generic(P("x"), kB, 0), CaseMismatch);
    CHECK_THROWS_AS(ExpSumCase::generic(P("sqrt(2)*x^2+1/2*sqrt(2)*x"), kB, 0), CaseMismatch);
    CHECK_NOTHROW(ExpSumCase::generic(P("sqrt(2)*x^2+3*x"), kB, 0));
    CHECK_THROWS_AS(ExpSumCase::generic(P("x^2+log(x)"), kB, 0), CaseMismatch);
    CHECK_NOTHROW(ExpSumCase::generic(P("sqrt(3)*x^2"), kB, Rat(1, 2)));
    CHECK_NOTHROW(ExpSumCase::generic(P("x^(3/2)+x"), kB, 0));
    CHECK_NOTHROW(ExpSumCase::generic(P("sqrt(2)*x^2+x"), kB, 0));

    ExpSumCase bad;
    bad.kind = CaseKind::CaseK;
    bad.a = P("x");
    bad.beta = kB;
    bad.k = 1;
    bad.p = P("x");
    CHECK_THROWS_AS(bad.validate(), CaseMismatch);
    bad.a = P("1/2*sqrt(2)*x");
    CHECK_NOTHROW(bad.validate());
    bad.p = P("1/2*x");
    bad.a = P("1/4*sqrt(2)*x");
    CHECK_THROWS_AS(bad.validate(), CaseMismatch);  // p must have integer coefficients

    auto kl = ExpSumCase::special(CaseKind::CaseKL, 2, -3, P("x"), kB, 0);
    CHECK(kl.l == 3);
    CHECK(kl.k == -2);
    CHECK_THROWS_AS(ExpSumCase::special(CaseKind::CaseL, 1, 2, P("x"), kB, 0), CaseMismatch);
    CHECK_THROWS_AS(ExpSumCase::linear(TaggedReal(Rat(1, 2))), CaseMismatch);
}

TEST_CASE("vanishing conditions on a small lattice") {
    for (auto& c : vanishing_cases()) {
        auto rep = vanishing_enumeration(c, 2);
        CHECK(rep.points > 0);
        CHECK(rep.mismatches == 0);
        CHECK(rep.numeric_mismatches == 0);
        CHECK(rep.e3_violations == 0);
        CHECK(rep.zeros > 0);
        CHECK(rep.zeros < rep.points);
    }
}

TEST_CASE("closed values are bounded by 1") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(-12, 12);
    auto cases = vanishing_cases();
    for (int it = 0; it < 200; ++it) {
        auto& c = cases[it % cases.size()];
        Rat q(num(rng), 6), r(num(rng), 6), sv(num(rng), 12);
        TaggedReal s(sv);
        auto cv = closed_A(c, q, r, t_of(kB, q, r, s), s);
        CHECK(std::abs(cv.value) <= 1.0 + 1e-12);
    }
}

TEST_CASE("zero-set labels") {
    auto g = ExpSumCase::generic(P("sqrt(3)*x"), kB, 0);
    CHECK(classify_zero_set(kB, 0, 0, g).kind == ZeroSetKind::E2);
    CHECK(classify_zero_set(kB, Rat(1, 2), 0, g).kind == ZeroSetKind::E1);
    // t in Z \ {q}, s = (t - q)/beta - r
    TaggedReal s = TaggedReal(1) / kB;
    auto lab = classify_zero_set(kB, 1, s, g);
    REQUIRE(lab.kind == ZeroSetKind::E3Candidate);
    CHECK(*lab.gamma == s);
    BruteEngine eng(g.a, kB, 0, 200000);
    CHECK(std::abs(eng.A(1, s, 200000).value) < 0.01);
    CHECK(std::abs(brute_B(kB, 1, s, 200000).value) > 0.1);
    CHECK_THROWS_AS(classify_zero_set(kB, TaggedReal::sqrt_of(3), 0, g), QDependenceInvalid);
}

TEST_CASE("scaling constants") {
    auto z = scaling_constant(kB, 3);
    CHECK(z.branch == ScalingBranch::IntegerGamma);
    CHECK(z.c == cplx(0.0));
    auto h = scaling_constant(kB, Rat(1, 2));
    CHECK(h.branch == ScalingBranch::RationalGamma);
    CHECK(std::abs(h.C - scaling_brute(kB, Rat(1, 2), 10000)) < 0.05);
    CHECK(std::abs(h.c * h.C - h.integral) < 1e-12);
    auto irr = scaling_constant(kB, TaggedReal(1) + kB);
    CHECK(irr.branch == ScalingBranch::Irrational);
    CHECK(std::abs(unit_integral(-(kB * (TaggedReal(1) + kB)))) > 1e-3);
    CHECK(std::abs(unit_integral(-(TaggedReal(1) + kB))) > 1e-3);
    auto rb = scaling_constant(kB, kB / TaggedReal(4));
    CHECK(rb.branch == ScalingBranch::RationalBetaGamma);
    CHECK(std::abs(rb.C - scaling_brute(kB, kB / TaggedReal(4), 10000)) < 0.05);
}
