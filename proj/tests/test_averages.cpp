#include <numbers>

#include "doctest.h"
#include "hergo/averages.hpp"

using namespace hergo;

namespace {

HardyExpr P(const char* s) { return HardyExpr::parse(s); }
const Mat2 kCat{2, 1, 1, 1};

ReportOptions grid(std::vector<int64_t> g) {
    ReportOptions o;
    o.N_grid = std::move(g);
    return o;
}

}  // namespace

TEST_CASE("multi_average examples") {
    auto rot = System::torus_rotation(1, {{TaggedReal(Rat(1, 2))}});
    auto e1 = Observable::character(rot.space(), {1});
    auto avg = multi_average(rot, {P("x")}, {e1}, 2);
    CHECK(l2_norm(avg) < 1e-15);

    auto one = Observable::constant(rot.space(), 1.0);
    CHECK(multi_average(rot, {P("x^(3/2)")}, {one}, 1000) == one);
    auto cat = System::cat_family({kCat});
    auto c1 = Observable::constant(cat.space(), 1.0);
    CHECK(multi_average(cat, {P("x")}, {c1}, 500) == c1);
    auto fin = System::finite_cyclic(7, {3});
    auto f1 = Observable::constant(fin.space(), 1.0);
    CHECK(l2_distance(multi_average(fin, {P("x*log(x)")}, {f1}, 500), f1) < 1e-15);

    // T1 = T2: e(x) e(-x) averages to 1, target 0
    auto a = TaggedReal::sqrt_of(2);
    auto two = System::torus_rotation(1, {{a}, {a}});
    auto ep = Observable::character(two.space(), {1});
    auto em = Observable::character(two.space(), {-1});
    auto rep = joint_ergodicity_report(two, {P("x"), P("x")}, {ep, em}, grid({100, 1000}));
    CHECK(std::abs(rep.final_residual() - 1.0) < 1e-12);
}

TEST_CASE("linearity of multi_average") {
    auto rot = System::torus_rotation(1, {{TaggedReal::sqrt_of(3)}, {TaggedReal(Rat(1, 5))}});
    auto sp = rot.space();
    auto f = Observable::trig(sp, {{{1}, 1.0}, {{2}, cplx(0, 1)}});
    auto g = Observable::trig(sp, {{{-1}, 0.5}, {{3}, 0.25}});
    auto h = Observable::character(sp, {1});
    std::vector<HardyExpr> a{P("x"), P("x^2")};
    auto lhs = multi_average(rot, a, {f + 2.0 * g, h}, 3000);
    auto rhs = multi_average(rot, a, {f, h}, 3000) + 2.0 * multi_average(rot, a, {g, h}, 3000);
    CHECK(l2_distance(lhs, rhs) < 1e-12);

    auto fin = System::finite_abelian({4, 3}, {{1, 0}, {1, 1}});
    std::vector<cplx> v1(12), v2(12);
    for (int i = 0; i < 12; ++i) v1[i] = {double(i % 5), 1.0}, v2[i] = {1.0, double(i % 3)};
    auto F = Observable::table(fin.space(), v1), G = Observable::table(fin.space(), v2);
    auto l2 = multi_average(fin, a, {F + G, G}, 2000);
    auto r2 = multi_average(fin, a, {F, G}, 2000) + multi_average(fin, a, {G, G}, 2000);
    CHECK(l2_distance(l2, r2) < 1e-12);
}

TEST_CASE("finite averages match direct pullbacks") {
    auto fin = System::finite_abelian({5, 3}, {{1, 1}, {2, 0}});
    std::vector<cplx> v1(15), v2(15);
    for (int i = 0; i < 15; ++i) v1[i] = {std::cos(i * 0.7), std::sin(i * 1.3)}, v2[i] = {double(i), -0.5 * i};
    auto F = Observable::table(fin.space(), v1), G = Observable::table(fin.space(), v2);
    std::vector<HardyExpr> a{P("x^(3/2)"), P("x+log(x)")};
    int64_t N = 300;
    auto avg = multi_average(fin, a, {F, G}, N);
    SequenceEvaluator s0(a[0]), s1(a[1]);
    Observable direct = Observable::constant(fin.space(), 0.0);
    for (int64_t n = 1; n <= N; ++n)
        direct += pullback(fin, 0, *s0.floor_at(n), F) * pullback(fin, 1, *s1.floor_at(n), G);
    CHECK(l2_distance(avg, (1.0 / N) * direct) < 1e-10);
}

TEST_CASE("automorphism averages match direct pullbacks") {
    auto cat = System::toral_automorphism({kCat}, {{1}, {1}});
    auto sp = cat.space();
    auto f = Observable::trig(sp, {{{1, 0}, 1.0}, {{0, 1}, 0.5}});
    auto g = Observable::trig(sp, {{{1, -1}, 1.0}, {{-1, 0}, cplx(0, 1)}});
    std::vector<HardyExpr> a{P("x"), P("x+log_2(x)")};
    int64_t N = 200;
    auto avg = multi_average(cat, a, {f, g}, N);
    SequenceEvaluator s0(a[0]), s1(a[1]);
    Observable direct = Observable::constant(sp, 0.0);
    for (int64_t n = 1; n <= N; ++n)
        direct += pullback(cat, 0, *s0.floor_at(n), f) * pullback(cat, 1, *s1.floor_at(n), g);
    CHECK(l2_distance(avg, (1.0 / N) * direct) < 1e-12);
}

TEST_CASE("Monte Carlo residual agrees with the exact path") {
    auto cat = System::toral_automorphism({kCat}, {{1}, {1}});
    auto sp = cat.space();
    auto f = Observable::trig(sp, {{{1, 0}, 1.0}, {{0, 1}, 0.5}});
    auto g = Observable::trig(sp, {{{1, 1}, 1.0}});
    AverageEngine eng(cat, {P("x"), P("x+log_2(x)")},
                      {{f, {{0, 0, 1}}}, {g, {{1, 1, 1}}}});
    auto exact = eng.residual(40, 0.0);
    auto mc = eng.monte_carlo_residual(40, 0.0, 4000, 9);
    CHECK(mc.monte_carlo);
    CHECK(std::abs(mc.value - exact.value) <= mc.mc_error);

    // x and x^2 leave the frequency budget
    AverageEngine big(cat, {P("x"), P("x^2")}, {{f, {{0, 0, 1}}}, {g, {{1, 1, 1}}}});
    CHECK_THROWS_AS(big.average(400), FrequencyOverflow);
    auto r = big.residual(400, 0.0, 64, 3);
    CHECK(r.monte_carlo);
}

TEST_CASE("joint ergodicity reports") {
    auto a = TaggedReal::sqrt_of(2);
    auto rot = System::torus_rotation(1, {{a}});
    auto e1 = Observable::character(rot.space(), {1});
    auto rep = joint_ergodicity_report(rot, {P("x")}, {e1}, grid({10, 100, 1000, 10000}));
    double bound0 = std::abs(1.0 - std::polar(1.0, 2 * std::numbers::pi * a.to_double()));
    for (size_t i = 0; i < rep.N_grid.size(); ++i)
        CHECK(rep.residuals[i] <= 2.0 / (rep.N_grid[i] * bound0) + 1e-12);
    CHECK(rep.skip_fraction == 0.0);

    auto c = Observable::constant(rot.space(), 3.0);
    CHECK(joint_ergodicity_report(rot, {P("x^(3/2)")}, {c}, grid({1000})).final_residual() < 1e-12);
    CHECK_THROWS(joint_ergodicity_report(rot, {P("x")}, {e1}, grid({100, 100})));
}

TEST_CASE("difference and product reports") {
    auto a = TaggedReal::sqrt_of(2);
    auto same = System::torus_rotation(1, {{a}, {a}});
    auto f = Observable::trig(same.space(), {{{0}, 0.5}, {{1}, 1.0}});
    auto d = difference_ergodicity_report(same, {P("x"), P("x")}, 0, 1, f, grid({1000}));
    CHECK(std::abs(d.final_residual() - 1.0) < 1e-12);

    auto sub = System::torus_rotation(1, {{a}, {TaggedReal::sqrt_of(3)}});
    auto e1 = Observable::character(sub.space(), {1});
    auto d2 = difference_ergodicity_report(sub, {P("x"), P("0*x")}, 0, 1, e1, grid({1000, 100000}));
    CHECK(d2.final_residual() < 1e-3);

    auto em = Observable::character(sub.space(), {-1});
    auto p = product_ergodicity_report(sub, {P("x"), P("x")}, {e1, em}, grid({100000}));
    CHECK(p.final_residual() < 1e-3);
    auto pe = product_ergodicity_report(same, {P("x"), P("x")}, {e1, em}, grid({1000}));
    CHECK(std::abs(pe.final_residual() - 1.0) < 1e-12);
    auto c = Observable::constant(sub.space(), 1.0);
    CHECK(product_ergodicity_report(sub, {P("x"), P("x")}, {c, c}, grid({1000})).final_residual() < 1e-12);
}

TEST_CASE("slowly growing sequences") {
    auto rot = System::torus_rotation(1, {{TaggedReal::sqrt_of(2) - TaggedReal(1)}});
    auto e1 = Observable::character(rot.space(), {1});
    auto r = single_ergodicity_report(rot, 0, P("log_2(x)"), e1, grid({1000000}));
    CHECK(r.final_residual() >= 0.3);

    auto cat = System::cat_family({kCat});
    auto f = Observable::trig(cat.space(), {{{1, 0}, 1.0}, {{0, -1}, 1.0}});
    auto rc = single_ergodicity_report(cat, 0, P("log_2(x)"), f, grid({100000}));
    CHECK(rc.final_residual() > 0.3);
}

TEST_CASE("weak residuals") {
    auto rot = System::torus_rotation(1, {{TaggedReal(Rat(1, 3))}});
    auto f = Observable::trig(rot.space(), {{{0}, 1.0}, {{1}, 2.0}});
    auto avg = multi_average(rot, {P("0*x")}, {f}, 10);
    auto w = weak_residuals(avg, 1.0);
    REQUIRE(w.size() == 8);
    CHECK(std::abs(w[0]) < 1e-15);
    CHECK(std::abs(w[1] - 2.0) < 1e-15);
}

TEST_CASE("averaging schemes") {
    std::vector<cplx> c(1000, cplx(0.7, -0.2));
    CHECK(std::abs(scheme_average(c, Scheme::cesaro(), 1000) - c[0]) < 1e-13);
    // (1/W(N)) sum w(n) = (W(N+1) - W(1)) / W(N)
    double drift = std::log(1001.0) / std::log(1000.0) - 1.0;
    CHECK(std::abs(scheme_average(c, Scheme::logarithmic(), 1000) - (1.0 + drift) * c[0]) < 1e-12);

    int64_t N = 1 << 20;
    std::vector<cplx> alt(N);
    for (int64_t n = 1; n <= N; ++n) alt[n - 1] = (n % 2) ? -1.0 : 1.0;
    CHECK(std::abs(scheme_average(alt, Scheme::cesaro(), N)) < 1e-12);
    auto pts = dyadic_points("2^N", N);
    CHECK(pts.back() == N);
    CHECK(std::abs(interval_average(alt, pts[pts.size() - 2], pts.back())) < 1e-12);

    // log averages of e(n alpha), against partial summation: |A| <= 2 / (log N |1 - e(alpha)|)
    double al = std::sqrt(2.0);
    std::vector<cplx> ph(N);
    for (int64_t n = 1; n <= N; ++n) ph[n - 1] = std::polar(1.0, 2 * std::numbers::pi * std::fmod(n * al, 1.0));
    double bound = 2.0 / (std::log(double(N)) * std::abs(1.0 - std::polar(1.0, 2 * std::numbers::pi * al)));
    CHECK(std::abs(scheme_average(ph, Scheme::logarithmic(), N)) <= bound);

    auto bad = Scheme::weighted("bad", [](int64_t n) { return n % 2 ? 1.0 + n : 100.0 - n; });
    CHECK_THROWS_AS(scheme_average(c, bad, 100), SchemeDomain);
    CHECK_THROWS_AS(dyadic_points("3^K", 100), SchemeDomain);
    CHECK(dyadic_points("floor(1.5^N)", 20) == std::vector<int64_t>{1, 2, 3, 5, 7, 11, 17});
}

TEST_CASE("dyadic intervals follow the Cesaro limit") {
    int64_t N = 1 << 20;
    std::vector<cplx> v(N);
    for (int64_t n = 1; n <= N; ++n) v[n - 1] = 2.0 + 1.0 / std::sqrt(double(n));
    auto rep = dyadic_check(v, 2.0, dyadic_points("2^N", N));
    CHECK(rep.within(10.0));
    CHECK(rep.dyadic_err.back() < 0.01);
}

TEST_CASE("linear sequences use the closed geometric sum") {
    auto r2 = TaggedReal::sqrt_of(2), r3 = TaggedReal::sqrt_of(3);
    auto A = System::torus_rotation(1, {{r2}, {r3}});
    auto B = System::torus_rotation(1, {{r2 * TaggedReal(Rat(1, 2))}, {r3 * TaggedReal(Rat(1, 2))}});
    auto f = [](const System& s) {
        return Observable::trig(s.space(), {{{1}, 1.0}, {{-2}, cplx(0, 1)}, {{2}, 0.5}});
    };
    for (int64_t N : {1000, 54321}) {
        auto x = HardyExpr::parse("x"), x2 = HardyExpr::parse("2*x");
        auto a = multi_average(A, {x, x}, {f(A), f(A)}, N);
        auto b = multi_average(B, {x2, x2}, {f(B), f(B)}, N);
        CHECK(a.coeffs().size() == b.coeffs().size());
        double d = 0;
        for (auto& [k, c] : a.coeffs()) d = std::max(d, std::abs(c - b.coeffs().at(k)));
        CHECK(d < 1e-12);
    }
    // resonant combination: frequencies -2 and 2 under T_1 = T_2 cancel exactly
    auto C = System::torus_rotation(1, {{r2}, {r2}});
    auto g = Observable::trig(C.space(), {{{2}, 1.0}, {{-2}, 1.0}});
    auto avg = multi_average(C, {HardyExpr::parse("x"), HardyExpr::parse("x")}, {g, g}, 1 << 20);
    CHECK(std::abs(integral(avg) - 2.0) < 1e-12);
}
