#include <random>

#include "doctest.h"
#include "hergo/seminorms.hpp"

using namespace hergo;

namespace {

std::vector<cplx> random_table(std::mt19937_64& rng, int64_t n, bool unit = true) {
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<cplx> v(n);
    for (auto& x : v) {
        x = {U(rng), U(rng)};
        if (unit && std::abs(x) > 1) x /= std::abs(x);
    }
    return v;
}

SubgroupSpec Z1(int64_t g) { return SubgroupSpec::integer({{g}}); }

}  // namespace

TEST_CASE("box seminorm examples") {
    auto c5 = System::finite_cyclic(5, {1});
    auto one = Observable::constant(c5.space(), 1.0);
    CHECK(box_seminorm(c5, one, {Z1(1)}).value == 1.0);
    CHECK(box_seminorm_plus(c5, one, {Z1(1), Z1(1)}).value == 1.0);
    auto chi = Observable::character(c5.space(), {1});
    CHECK(box_seminorm(c5, chi, {Z1(1)}).value < 1e-7);

    auto c7 = System::finite_abelian({7, 7}, {{1, 0}, {0, 1}});
    auto c = Observable::constant(c7.space(), cplx(0.6, -0.8) * 0.5);
    auto G = SubgroupSpec::standard(2);
    CHECK(box_seminorm(c7, c, {G}).value == 0.5);
    CHECK(box_seminorm(c7, c, {G, G}).value == 0.5);
    CHECK(box_seminorm_plus(c7, c, {G}).value == 0.5);
}

TEST_CASE("shift laws") {
    auto c12 = System::finite_cyclic(12, {1});
    auto m = shift_distribution(c12, Z1(3)).mass;
    CHECK(m.size() == 4);
    for (auto& [y, w] : m) {
        CHECK(y % 3 == 0);
        CHECK(std::abs(w - 0.25) < 1e-15);
    }
    // floor(n/2) covers every residue with equal weight
    auto h = shift_distribution(c12, SubgroupSpec::of({{TaggedReal(Rat(1, 2))}})).mass;
    CHECK(h.size() == 12);
    // floor(3n/2) along T: n = 0,1 give 0,1; period 2 adds 3
    auto q = shift_distribution(c12, SubgroupSpec::of({{TaggedReal(Rat(3, 2))}})).mass;
    CHECK(q.size() == 8);
    CHECK_THROWS_AS(shift_distribution(c12, SubgroupSpec::of({{TaggedReal::sqrt_of(2)}})), UnsupportedPath);

    // two rational generators on Z/6 x Z/4 against counting over one full period box
    auto sys = System::finite_abelian({6, 4}, {{1, 0}, {2, 3}});
    Rat g[2][2] = {{Rat(1, 2), Rat(1)}, {Rat(-2), Rat(3, 2)}};
    SubgroupSpec G = SubgroupSpec::of({{TaggedReal(g[0][0]), TaggedReal(g[0][1])}, {TaggedReal(g[1][0]), TaggedReal(g[1][1])}});
    std::map<int64_t, double> box;
    const int64_t P = 2 * 12;
    for (int64_t n0 = 0; n0 < P; ++n0)
        for (int64_t n1 = 0; n1 < P; ++n1) {
            std::vector<int64_t> v(2);
            for (int j = 0; j < 2; ++j) v[j] = static_cast<int64_t>(rat_floor(g[0][j] * n0 + g[1][j] * n1));
            std::vector<int64_t> st{0, 0};
            for (int m = 0; m < 2; ++m)
                for (int i = 0; i < 2; ++i) st[i] = mod64(st[i] + v[m] * sys.shift(m)[i], sys.space()->moduli[i]);
            box[sys.space()->index(st)] += 1.0 / (P * P);
        }
    auto law = shift_distribution(sys, G).mass;
    REQUIRE(law.size() == box.size());
    for (auto& [y, w] : box) CHECK(std::abs(law.at(y) - w) < 1e-15);
}

TEST_CASE("plus seminorm equals the tensor identity") {
    std::mt19937_64 rng(17);
    auto sys = System::finite_abelian({6, 2}, {{1, 0}, {2, 1}});
    auto sq = diagonal_square(sys);
    std::vector<SubgroupSpec> gs[] = {
        {SubgroupSpec::integer({{1, 0}})},
        {SubgroupSpec::integer({{1, 1}}), SubgroupSpec::integer({{0, 1}})},
        {SubgroupSpec::of({{TaggedReal(Rat(1, 2)), TaggedReal(0)}}), SubgroupSpec::standard(2)},
    };
    for (int it = 0; it < 6; ++it) {
        auto f = Observable::table(sys.space(), random_table(rng, 12));
        for (auto& g : gs) {
            double p = box_seminorm_plus(sys, f, g).value;
            double t = std::sqrt(box_seminorm(sq, tensor({f, f.conj()}), g).value);
            CHECK(std::abs(p - t) < 1e-9);
        }
    }
}

TEST_CASE("character seminorms") {
    auto c12 = System::finite_cyclic(12, {1, 4});
    auto G1 = SubgroupSpec::integer({{1, 0}}), G2 = SubgroupSpec::integer({{0, 1}});
    for (int k = 0; k < 12; ++k) {
        auto chi = Observable::character(c12.space(), {k});
        CHECK(std::abs(box_seminorm_plus(c12, chi, {G1}).value - 1.0) < 1e-12);
        CHECK(std::abs(box_seminorm(c12, chi, {G1, G2}).value - 1.0) < 1e-12);
        // invariant under the shift by 4 iff 3 | k
        double v = box_seminorm(c12, chi, {G2}).value;
        CHECK(std::abs(v - (k % 3 == 0 ? 1.0 : 0.0)) < 1e-7);
    }
    // 2^s-power mean of distinct characters, single-generator groups
    std::vector<cplx> c = {0.5, cplx(0, 0.3), -0.2};
    std::vector<int> ks = {0, 3, 5};
    Observable f = Observable::constant(c12.space(), 0.0);
    for (int i = 0; i < 3; ++i) f += Observable::character(c12.space(), {ks[i]}, c[i]);
    for (auto& gr : std::vector<std::vector<SubgroupSpec>>{{G2}, {G1, G1}}) {
        size_t s = gr.size();
        double lhs = std::pow(box_seminorm(c12, f, gr).value, std::ldexp(1.0, static_cast<int>(s)));
        double rhs = 0;
        for (int i = 0; i < 3; ++i) {
            auto chi = Observable::character(c12.space(), {ks[i]});
            rhs += std::pow(std::abs(c[i]), std::ldexp(1.0, static_cast<int>(s))) *
                   std::pow(box_seminorm(c12, chi, gr).value, std::ldexp(1.0, static_cast<int>(s)));
        }
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("dual functions and the GCS bound") {
    auto c7 = System::finite_cyclic(7, {1});
    auto one = Observable::constant(c7.space(), 1.0);
    auto D1 = dual_function(c7, {one}, {Z1(1)});
    CHECK(l2_distance(D1, one) < 1e-15);
    auto chi = Observable::character(c7.space(), {2});
    CHECK(l2_norm(dual_function(c7, {chi}, {Z1(1)})) < 1e-14);

    auto g = gcs_check(c7, chi, {Observable::character(c7.space(), {3})}, {Z1(1)});
    CHECK(g.lhs < 1e-14);
    CHECK(g.holds);
    auto g1 = gcs_check(c7, one, {one}, {Z1(1)});
    CHECK(std::abs(g1.lhs - 1.0) < 1e-12);
    CHECK(g1.holds);

    std::mt19937_64 rng(5);
    auto c12 = System::finite_abelian({12}, {{1}, {5}});
    std::vector<SubgroupSpec> gr{SubgroupSpec::integer({{1, 0}}), SubgroupSpec::integer({{1, 1}})};
    for (int it = 0; it < 100; ++it) {
        auto f = Observable::table(c12.space(), random_table(rng, 12));
        std::vector<Observable> fe;
        for (int e = 0; e < 3; ++e) fe.push_back(Observable::table(c12.space(), random_table(rng, 12)));
        auto r = gcs_check(c12, f, fe, gr);
        CHECK(r.holds);
        CHECK(r.lhs <= r.sharp + 1e-9);
    }
    // <f, D(f)> with conjugated corners recovers ||f||^{2^s}
    auto f = Observable::table(c12.space(), random_table(rng, 12));
    auto D = dual_function(c12, {f.conj(), f.conj(), f}, gr);
    CHECK(std::abs(integral(f * D) - std::pow(box_seminorm(c12, f, gr).value, 4)) < 1e-12);

    auto rot = System::torus_rotation(1, {{TaggedReal::sqrt_of(2)}});
    auto e1 = Observable::character(rot.space(), {1});
    CHECK_THROWS_AS(dual_function(rot, {e1}, {Z1(1)}), UnsupportedPath);
}

TEST_CASE("property suite on random instances") {
    std::mt19937_64 rng(23);
    std::vector<std::pair<std::vector<int64_t>, std::vector<std::vector<int64_t>>>> systems = {
        {{9}, {{1}, {3}}}, {{12}, {{1}, {2}}}, {{4, 3}, {{1, 0}, {1, 1}}}, {{10}, {{3}, {5}}}, {{15}, {{1}, {6}}}};
    std::vector<std::vector<int64_t>> gens = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}};
    int part_v = 0;
    for (int it = 0; it < 40; ++it) {
        auto& [mod, sh] = systems[it % systems.size()];
        auto sys = System::finite_abelian(mod, sh);
        auto f = Observable::table(sys.space(), random_table(rng, sys.space()->states()));
        std::vector<SubgroupSpec> gr;
        int s = 1 + it % 2;
        for (int i = 0; i < s; ++i) gr.push_back(SubgroupSpec::integer({gens[rng() % gens.size()]}));
        auto rep = property_suite(sys, f, gr, SubgroupSpec::integer({gens[rng() % gens.size()]}));
        CHECK(rep.ok());
        CHECK(rep.rescaling_ratio > 0);
        part_v += rep.part_v_applicable;
    }
    CHECK(part_v > 0);

    // G = <1> vs <2> on M = 9
    auto c9 = System::finite_cyclic(9, {1});
    auto f = Observable::table(c9.space(), random_table(rng, 9));
    auto rep = property_suite(c9, f, {Z1(1)}, Z1(1));
    CHECK(rep.part_v_applicable);
    CHECK(rep.part_v_gap < 1e-12);
    auto c8 = System::finite_cyclic(8, {1});
    auto rep8 = property_suite(c8, Observable::table(c8.space(), random_table(rng, 8)), {Z1(1)}, Z1(1));
    CHECK(!rep8.part_v_applicable);
    CHECK(rep8.ok());
}

TEST_CASE("factor projection") {
    auto c8 = System::finite_cyclic(8, {2});
    std::vector<SubgroupSpec> G{Z1(1)};
    auto chi0 = Observable::constant(c8.space(), 1.0);
    CHECK(l2_distance(factor_project(c8, chi0, G), chi0) < 1e-14);
    // invariant under +2 iff 4 | k
    auto a = Observable::character(c8.space(), {4}), b = Observable::character(c8.space(), {1});
    CHECK(l2_distance(factor_project(c8, a + b, G), a) < 1e-13);
    CHECK(l2_norm(factor_project(c8, b, G)) < 1e-13);
    auto rest = (a + b) - factor_project(c8, a + b, G);
    CHECK(box_seminorm(c8, rest, G).value < 1e-9);
}

TEST_CASE("concatenation decomposition") {
    auto sys = System::finite_abelian({8, 8}, {{1, 0}, {0, 1}});
    auto sp = sys.space();
    auto H = SubgroupSpec::integer({{1, 0}}), Hp = SubgroupSpec::integer({{0, 1}});
    auto zero = Observable::constant(sp, 0.0);
    auto [z1, z2] = concat_decompose(sys, zero, {}, H, Hp);
    CHECK(l2_norm(z1) + l2_norm(z2) < 1e-15);

    // characters (a, b) with (a, b) != 0 are null for H + H' = Z^2
    std::mt19937_64 rng(3);
    std::vector<cplx> c(64, 0.0);
    for (int k = 1; k < 64; ++k) c[k] = {double(rng() % 7) - 3.0, double(rng() % 5) - 2.0};
    auto f = from_character_coefficients(sp, c);
    auto [g1, g2] = concat_decompose(sys, f, {}, H, Hp);
    CHECK(l2_distance(g1 + g2, f) < 1e-12);
    CHECK(box_seminorm(sys, g1, {H}).value < 1e-9);
    CHECK(box_seminorm(sys, g2, {Hp}).value < 1e-9);
    // g2 holds exactly the characters (0, b), b != 0
    auto c2 = character_coefficients(g2);
    for (int k = 0; k < 64; ++k) CHECK(std::abs(c2[k] - ((k % 8 == 0 && k) ? c[k] : 0.0)) < 1e-12);

    auto already = Observable::character(sp, {1, 3});
    auto [h1, h2] = concat_decompose(sys, already, {}, H, Hp);
    CHECK(l2_distance(h1, already) < 1e-12);
    CHECK(l2_norm(h2) < 1e-12);

    CHECK_THROWS_AS(concat_decompose(sys, Observable::constant(sp, 1.0), {}, H, Hp), std::invalid_argument);
}

TEST_CASE("torus seminorms") {
    auto a = TaggedReal::sqrt_of(2);
    auto rot = System::torus_rotation(1, {{a}, {TaggedReal(Rat(1, 2))}});
    auto e1 = Observable::character(rot.space(), {1});
    auto G1 = SubgroupSpec::integer({{1, 0}});
    auto s1 = box_seminorm(rot, e1, {G1});
    CHECK(s1.exactness == SeminormValue::Exactness::MonteCarlo);
    CHECK(s1.value < 0.05);
    CHECK(!s1.nonconvergence);
    auto e2 = Observable::character(rot.space(), {2});
    auto G2 = SubgroupSpec::integer({{0, 1}});
    CHECK(std::abs(box_seminorm(rot, e2, {G2}).value - 1.0) < 1e-12);
    CHECK(box_seminorm(rot, e1, {G2}).value < 1e-12);
    // characters have plus and s = 2 seminorms 1
    CHECK(std::abs(box_seminorm_plus(rot, e1, {G1}).value - 1.0) < 1e-12);
    CHECK(std::abs(box_seminorm(rot, e1, {G1, G1}).value - 1.0) < 1e-12);
    // inequalities only on the torus path
    auto f = Observable::trig(rot.space(), {{{1}, 0.5}, {{2}, 0.5}});
    double c = box_seminorm(rot, f, {G1}).value, p = box_seminorm_plus(rot, f, {G1}).value;
    CHECK(c <= p + 1e-9);
    CHECK(p <= box_seminorm(rot, f, {G1, G2}).value + 1e-9);
    auto irr = SubgroupSpec::of({{TaggedReal::sqrt_of(3), TaggedReal(0)}});
    CHECK(box_seminorm(rot, e1, {irr}).value < 0.1);
    auto cat = System::cat_family({Mat2{2, 1, 1, 1}});
    CHECK_THROWS_AS(box_seminorm(cat, Observable::character(cat.space(), {1, 0}), {Z1(1)}), UnsupportedPath);
}

TEST_CASE("seminorm comparison") {
    auto sys = System::finite_abelian({6, 6}, {{1, 0}, {0, 1}});
    auto sp = sys.space();
    std::mt19937_64 rng(2);
    std::vector<Observable> fam{Observable::constant(sp, 0.7), Observable::constant(sp, 0.0),
                                Observable::table(sp, random_table(rng, 36))};
    auto rep = seminorm_comparison_check(sys, HardyExpr::parse("2*x"), HardyExpr::parse("x+log(x)"), TaggedReal(2),
                                         TaggedReal(1), fam, 1000);
    CHECK(rep.precondition_log);
    CHECK(rep.implication_holds);
    CHECK(std::abs(rep.pairs[0].first - 0.7) < 1e-15);
    CHECK(std::abs(rep.pairs[0].second - 0.7) < 1e-15);
    CHECK(rep.pairs[1].second <= 1e-6);
    CHECK_THROWS(seminorm_comparison_check(sys, HardyExpr::parse("x^2"), HardyExpr::parse("x"), TaggedReal(1),
                                           TaggedReal(1), fam, 100));
}
