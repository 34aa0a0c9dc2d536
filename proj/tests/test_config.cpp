#include "doctest.h"
#include "hergo/recipes.hpp"

using namespace hergo;

TEST_CASE("scalar descriptors") {
    CHECK(scalar_from_json(json::parse("3")) == TaggedReal(3));
    CHECK(scalar_from_json(json::parse(R"(["sqrt", 2])")) == TaggedReal::sqrt_of(2));
    CHECK(scalar_from_json(json::parse(R"(["rat", 1, 3])")) == TaggedReal(Rat(1, 3)));
    CHECK(scalar_from_json(json::parse(R"(["quad", "1/2", "1/2", 5])")) == TaggedReal::quad(Rat(1, 2), Rat(1, 2), 5));
    CHECK(scalar_from_json(json::parse(R"("sqrt(2)/2")")) == TaggedReal::sqrt_of(2) * TaggedReal(Rat(1, 2)));
    CHECK(scalar_from_json(json::parse("0.25")).kind() == TaggedReal::Kind::Flagged);
    CHECK_THROWS_AS(scalar_from_json(json::parse(R"(["cbrt", 2])")), ConfigError);
    CHECK(complex_from_json(json::parse("[1, -2]")) == cplx(1, -2));
}

TEST_CASE("system descriptors") {
    auto rot = system_from_json(json::parse(R"({"type":"torus_rotation","d":1,"alphas":[["sqrt",2]]})"));
    CHECK(rot.kind() == System::Kind::TorusRotation);
    CHECK(rot.alpha(0)[0] == TaggedReal::sqrt_of(2));
    auto rot2 = system_from_json(json::parse(R"({"type":"torus_rotation","d":2,"alphas":[["1/2", ["sqrt",3]], [0, 1]]})"));
    CHECK(rot2.ell() == 2);
    CHECK(rot2.alpha(0)[1] == TaggedReal::sqrt_of(3));

    auto fc = system_from_json(json::parse(R"({"type":"finite_cyclic","M":5,"shifts":[1,2]})"));
    CHECK(fc.space()->states() == 5);
    auto sq = system_from_json(json::parse(R"({"type":"product","of":{"type":"finite_cyclic","M":5,"shifts":[1]}})"));
    CHECK(sq.space()->states() == 5);
    auto two = system_from_json(json::parse(R"({"type":"product","of":{"type":"finite_cyclic","M":5,"shifts":[1,1]}})"));
    CHECK(two.space()->states() == 25);

    auto cat = system_from_json(json::parse(R"({"type":"cat_family","matrices":[[2,1,1,1],[5,3,3,2]]})"));
    CHECK(cat.powers(1)[0] == 2);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"type":"finite_cyclic","M":5,"shifts":[1],"extra":0})")),
                    ConfigError);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"type":"lattice"})")), ConfigError);
    // det 2 is not an automorphism
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"type":"cat_family","matrices":[[2,0,0,1]]})")), ConfigError);
}

TEST_CASE("observable and subgroup descriptors") {
    auto sys = System::finite_cyclic(7, {1});
    auto f = observable_from_json(json::parse(R"({"sum":[{"constant":3},{"character":[2],"c":[0,1]}]})"), sys.space());
    CHECK(std::abs(integral(f) - 3.0) < 1e-15);
    auto t = System::torus_rotation(1, {{TaggedReal::sqrt_of(2)}});
    auto g = observable_from_json(json::parse(R"({"trig":[{"k":[1],"c":1},{"k":[0],"c":[2,0]}]})"), t.space());
    CHECK(integral(g) == cplx(2, 0));
    CHECK_THROWS_AS(observable_from_json(json::parse(R"({"table":[1,2]})"), sys.space()), ConfigError);

    auto G = subgroup_from_json(json::parse(R"([[1, "1/2"], [0, 2]])"), 2);
    CHECK(G.rational());
    CHECK(!G.integral());
    CHECK(subgroup_from_json(json::parse(R"({"standard": 3})"), 3).gens.size() == 3);
    CHECK_THROWS_AS(subgroup_from_json(json::parse("[[1, 2, 3]]"), 2), ConfigError);
}

TEST_CASE("recipe instances are pure functions of seed and index") {
    auto a = props_instance(5, 17), b = props_instance(5, 17), c = props_instance(6, 17);
    CHECK(a.f == b.f);
    CHECK(a.label == b.label);
    CHECK(!(a.f == c.f));
    auto x = concat_instance(3, 42), y = concat_instance(3, 42);
    CHECK(x.f == y.f);
    CHECK(x.label == y.label);

    auto full = run_recipe("props-run", json::parse(R"({"count": 12, "gcs": 4})"), RunContext{9});
    std::vector<size_t> only{3, 14};
    auto part = run_recipe("props-run", json::parse(R"({"count": 12, "gcs": 4})"), RunContext{9}, &only);
    REQUIRE(part.instances.size() == 2);
    CHECK(part.instances[0].dump() == full.instances[3].dump());
    CHECK(part.instances[1].dump() == full.instances[14].dump());
    CHECK_THROWS_AS(run_recipe("props-run", json::parse(R"({"cnt": 1})"), RunContext{}), ConfigError);
    CHECK_THROWS_AS(run_recipe("no-such-kind", json::object(), RunContext{}), ConfigError);
}

TEST_CASE("average report to json and csv") {
    auto rot = System::torus_rotation(1, {{TaggedReal::sqrt_of(2)}});
    ReportOptions opt;
    opt.N_grid = {10, 100};
    auto rep = joint_ergodicity_report(rot, {HardyExpr::parse("x")}, {Observable::character(rot.space(), {1})}, opt);
    auto j = to_json(rep);
    CHECK(j.at("N_grid").size() == 2);
    CHECK(!j.contains("wall_time"));
    auto csv = report_csv(rep);
    CHECK(csv.rfind("N,residual,skip_fraction\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
