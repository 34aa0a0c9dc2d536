#include <random>

#include "doctest.h"
#include "hergo/cyclo.hpp"

using namespace hergo;

TEST_CASE("cyclotomic polynomials") {
    CHECK(cyclotomic(1) == std::vector<BigInt>{-1, 1});
    CHECK(cyclotomic(6) == std::vector<BigInt>{1, -1, 1});
    CHECK(cyclotomic(12) == std::vector<BigInt>{1, 0, -1, 0, 1});
    CHECK(cyclotomic(105).size() == 49);  // degree phi(105) = 48
}

TEST_CASE("root of unity sums vanish exactly") {
    for (int M : {2, 3, 6, 12, 30}) {
        CycloSum s;
        for (int k = 0; k < M; ++k) s.add(Rat(1), Rat(k, M));
        CHECK(s.is_zero());
        CHECK(std::abs(s.value()) < 1e-12);
    }
    CycloSum a;
    a.add(Rat(1), Rat(0));
    a.add(Rat(1), Rat(1, 5));
    CHECK(!a.is_zero());
    // e(1/6) - e(1/3) - 1 + ... : 1 - e(1/6) + e(1/3) = 0
    CycloSum b;
    b.add(Rat(1), Rat(0));
    b.add(Rat(-1), Rat(1, 6));
    b.add(Rat(1), Rat(1, 3));
    CHECK(b.is_zero());
}

TEST_CASE("Gauss sums represent square roots") {
    for (int64_t d : {1, 2, 3, 5, 6, 7, 10, 11, 15, 30}) {
        std::complex<double> v = 0;
        for (auto& [c, ph] : sqrt_as_roots_of_unity(d)) v += rat_to_double(c) * expi_rat(ph);
        CHECK(std::abs(v - std::sqrt(double(d))) < 1e-12);
    }
    CycloSum s;
    s.add(TaggedReal::sqrt_of(3), Rat(0));
    s.add(Rat(-1), Rat(1, 12));
    s.add(Rat(-1), Rat(-1, 12));  // 2 cos(pi/6) = sqrt 3
    CHECK(s.is_zero());
}

TEST_CASE("irrational directions separate") {
    TaggedReal th = TaggedReal::sqrt_of(2);
    CycloSum s;
    s.add_phase(1, TaggedReal::quad(Rat(1, 2), 1, 2), th);
    s.add_phase(1, TaggedReal::quad(0, 1, 2), th);  // e(1/2 + t) + e(t) = 0
    CHECK(s.is_zero());
    CycloSum t;
    t.add_phase(1, TaggedReal::quad(0, 1, 2), th);
    t.add_phase(1, TaggedReal::quad(0, 2, 2), th);
    CHECK(!t.is_zero());
}

TEST_CASE("random sums agree with floating evaluation") {
    std::mt19937 rng(3);
    for (int it = 0; it < 200; ++it) {
        CycloSum s;
        int M = 1 + rng() % 12;
        for (int k = 0; k < M; ++k)
            if (rng() % 2) s.add(Rat(int(rng() % 3) - 1), Rat(k, M));
        CHECK(s.is_zero() == (std::abs(s.value()) < 1e-9));
    }
}
