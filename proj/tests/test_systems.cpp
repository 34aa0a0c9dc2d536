#include <random>

#include "doctest.h"
#include "hergo/systems.hpp"

using namespace hergo;

namespace {

const Mat2 kCat{2, 1, 1, 1};

bool close(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

cplx coeff(const Observable& f, const FreqKey& k) {
    auto it = f.coeffs().find(k);
    return it == f.coeffs().end() ? cplx(0) : it->second;
}

}  // namespace

TEST_CASE("rotation pullback phases") {
    auto sys = System::torus_rotation(1, {{TaggedReal(Rat(1, 4))}});
    auto f = Observable::character(sys.space(), {1});
    CHECK(close(coeff(pullback(sys, 0, 1, f), {1}), cplx(0, 1)));
    CHECK(close(coeff(pullback(sys, 0, 4, f), {1}), cplx(1, 0)));

    // frozen mpmath values at 50 digits
    auto irr = System::torus_rotation(1, {{TaggedReal::sqrt_of(2)}});
    auto g = pullback(irr, 0, 1000000, Observable::character(irr.space(), {1}));
    CHECK(close(coeff(g, {1}), {-0.92418437804483735461, -0.38194663943786329724}, 1e-12));
    auto q = System::torus_rotation(1, {{(TaggedReal::sqrt_of(3) - TaggedReal(1)) / TaggedReal(2)}});
    auto h = pullback(q, 0, 123456789, Observable::character(q.space(), {1}));
    CHECK(close(coeff(h, {1}), {0.96261667408877478613, 0.27086738224870403408}, 1e-10));
}

TEST_CASE("cat map pullback and canonical keys") {
    auto sys = System::toral_automorphism({kCat}, {{1}});
    auto sp = sys.space();
    auto f = Observable::character(sp, {1, 0});
    auto g = pullback(sys, 0, 1, f);
    CHECK(g == Observable::character(sp, {2, 1}));
    auto fr = frequencies(pullback(sys, 0, 3, f));
    REQUIRE(fr.size() == 1);
    CHECK(fr[0].first == std::vector<BigInt>{13, 8});

    const HypBlock& B = sp->blocks[0];
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int64_t> u(-50, 50);
    for (int it = 0; it < 200; ++it) {
        BigInt u1 = u(rng), u2 = u(rng);
        if (u1 == 0 && u2 == 0) continue;
        auto [v0, e] = B.canonical(u1, u2);
        auto back = B.apply(e, v0[0], v0[1]);
        CHECK(back[0] == u1);
        CHECK(back[1] == u2);
        auto w = B.apply(5, u1, u2);
        auto [w0, we] = B.canonical(w[0], w[1]);
        CHECK(w0 == v0);
        CHECK(we == e + 5);
    }
    // deep orbit: exponents beyond the budget raise
    CHECK_NOTHROW(pullback(sys, 0, 100000, f));
    CHECK_THROWS_AS(frequencies(pullback(sys, 0, 1000, f)), FrequencyOverflow);
}

TEST_CASE("cat map mixing is exact") {
    auto sys = System::cat_family({kCat});
    auto sp = sys.space();
    auto f = Observable::trig(sp, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, cplx(0, 1)}});
    auto g = Observable::trig(sp, {{{1, 1}, 1.0}, {{2, -1}, 0.5}});
    for (int n = 6; n < 20; ++n) CHECK(inner(pullback(sys, 0, n, f), g) == cplx(0));
    auto c = Observable::constant(sp, 2.0);
    CHECK(pullback(sys, 0, 7, c) == c);
    CHECK_THROWS(System::cat_family({Mat2{1, 1, 0, 1}}));
    auto fam = System::cat_family({kCat, Mat2{5, 3, 3, 2}, Mat2{}});
    CHECK(fam.powers(0) == std::vector<int64_t>{1});
    CHECK(fam.powers(1) == std::vector<int64_t>{2});
    CHECK(fam.powers(2) == std::vector<int64_t>{0});
    CHECK_THROWS(System::cat_family({kCat, Mat2{3, 1, 2, 1}}));
}

TEST_CASE("integrals and distances") {
    auto sp = Space::finite({5});
    auto c = Observable::constant(sp, 3.0);
    CHECK(integral(c) == cplx(3));
    auto chi = Observable::character(sp, {1});
    CHECK(close(integral(chi), 0.0));
    CHECK(std::abs(l2_distance(chi, Observable::constant(sp, 0.0)) - 1.0) < 1e-12);
    auto t = Space::torus(2);
    auto a = Observable::character(t, {1, 0});
    auto b = Observable::character(t, {0, 1});
    CHECK(std::abs(l2_distance(a, Observable::constant(t, 0.0)) - 1.0) < 1e-15);
    CHECK(std::abs(l2_distance(a, b) - std::sqrt(2.0)) < 1e-15);
    CHECK(integral(a * a.conj()) == cplx(1));
    CHECK_THROWS_AS(inner(a, chi), SpaceMismatch);
    CHECK(Observable::trig(t, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}}).is_real());
    CHECK(!a.is_real());
}

TEST_CASE("unitarity and group action") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    auto fin = System::finite_abelian({6, 4}, {{1, 0}, {2, 3}});
    std::vector<cplx> vals(24);
    for (auto& v : vals) v = {U(rng), U(rng)};
    auto f = Observable::table(fin.space(), vals);
    auto rot = System::torus_rotation(1, {{TaggedReal::sqrt_of(2)}, {TaggedReal(Rat(1, 3))}});
    auto g = Observable::trig(rot.space(), {{{1}, 0.5}, {{-2}, cplx(0, 1)}, {{3}, 0.25}});
    auto aut = System::toral_automorphism({kCat}, {{1}, {2}});
    auto h = Observable::trig(aut.space(), {{{1, 0}, 1.0}, {{0, 1}, 0.5}, {{1, 1}, 0.25}});

    for (auto* sys : {&fin, &rot, &aut}) {
        const Observable& x = sys == &fin ? f : sys == &rot ? g : h;
        for (int n : {1, 3, 17}) {
            auto y = pullback(*sys, 1, n, x);
            CHECK(std::abs(l2_norm(y) - l2_norm(x)) < 1e-12);
            CHECK(close(integral(y), integral(x)));
            auto z1 = pullback(*sys, 0, n, pullback(*sys, 1, 2, x));
            auto z2 = pullback(*sys, 1, 2, pullback(*sys, 0, n, x));
            CHECK(l2_distance(z1, z2) < 1e-12);
            auto s1 = pullback(*sys, 0, n + 4, x);
            auto s2 = pullback(*sys, 0, 4, pullback(*sys, 0, n, x));
            CHECK(l2_distance(s1, s2) < 1e-12);
            auto p = pullback_vec(*sys, {n, -2}, x);
            CHECK(l2_distance(p, pullback(*sys, 1, -2, pullback(*sys, 0, n, x))) < 1e-12);
        }
        CHECK(sys->commute_check());
    }
}

TEST_CASE("products of observables on automorphism tori") {
    auto sys = System::toral_automorphism({kCat}, {{1}});
    auto sp = sys.space();
    auto a = Observable::character(sp, {1, 0});
    auto b = Observable::character(sp, {2, 1});
    auto prod = a * b;
    auto fr = frequencies(prod);
    REQUIRE(fr.size() == 1);
    CHECK(fr[0].first == std::vector<BigInt>{3, 1});
    CHECK(integral(a * a.conj()) == cplx(1));
    // T f * T g = T (f g)
    auto lhs = pullback(sys, 0, 9, a) * pullback(sys, 0, 9, b);
    CHECK(lhs == pullback(sys, 0, 9, prod));
}

TEST_CASE("product systems") {
    auto c5 = System::finite_cyclic(5, {1, 2});
    auto p = product_system(c5);
    CHECK(p.space()->states() == 25);
    auto chi = Observable::character(c5.space(), {1});
    auto t = tensor({chi, Observable::constant(c5.space(), 1.0)});
    CHECK(close(integral(t), 0.0));
    auto tt = tensor({chi, chi.conj()});
    CHECK(close(integral(tt), 0.0));
    // T_1 acts on the first coordinate only
    auto moved = pullback(p, 0, 1, t);
    CHECK(l2_distance(moved, tensor({pullback(c5, 0, 1, chi), Observable::constant(c5.space(), 1.0)})) < 1e-12);

    auto rot = System::torus_rotation(1, {{TaggedReal::sqrt_of(2)}, {TaggedReal::sqrt_of(3)}});
    auto pr = product_system(rot);
    CHECK(pr.space()->dim == 2);
    auto e1 = Observable::character(rot.space(), {1});
    auto te = tensor({e1, e1});
    CHECK(te.coeffs().count({1, 1}) == 1);
    auto pb = pullback(pr, 1, 10, te);
    CHECK(close(coeff(pb, {1, 1}), coeff(pullback(rot, 1, 10, e1), {1})));

    auto sq = diagonal_square(c5);
    CHECK(sq.space()->states() == 25);
    auto ds = pullback(sq, 0, 1, tensor({chi, chi.conj()}));
    CHECK(l2_distance(ds, tensor({chi, chi.conj()})) < 1e-12);

    auto aut = System::toral_automorphism({kCat}, {{1}, {2}});
    auto pa = product_system(aut);
    CHECK(pa.space()->blocks.size() == 2);
    CHECK(pa.powers(1) == std::vector<int64_t>{0, 2});
}
