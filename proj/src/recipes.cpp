#include "hergo/recipes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hergo/cyclo.hpp"

namespace hergo {

// ---- equidistribution corpus ----

std::vector<std::string> weyl_corpus() {
    return {// equidistributed
            "sqrt(2)*x", "sqrt(3)*x+1/2", "x^{3/2}", "x*log(x)", "log(x)^2", "x^2+x^{1/2}", "x^{1/2}", "x^{1/3}",
            "sqrt(2)*x^2", "sqrt(5)*x^3", "x^{5/2}", "x^{7/3}", "x^{3/2}+1/3*x", "2*x*log(x)", "log(x)^3",
            "1/2*log(x)^2", "x^{1/2}*log(x)", "sqrt(2)*x+x^{1/2}", "sqrt(3)*x^2+1/2*x", "x^{4/3}", "x^{6/5}",
            "sqrt(2)*x+log(x)", "1/3*x+x^{1/2}", "x*log(x)^2", "1/7*x^{3/2}", "(1+sqrt(5))/2*x", "x^{2/3}",
            "sqrt(2)*x^2+x/3", "x^{3/2}*log(x)", "x^{5/3}+x",
            // not equidistributed
            "x/2", "x/3+1/7", "x^2/5", "x^2/4+x/2", "1/3", "sqrt(2)", "x+1/20*log(x)", "2*x", "x^2+3*x",
            "x/4+x^2/2", "1/30*log(x)", "3/2*x+1/5", "x^3/3", "5/4*x^2-x/2", "1/50*log(x)", "x^2/2+1/25*log(x)",
            "sqrt(2)+x/3", "-x/5", "0", "x^3/5+x^2/5"};
}

std::vector<double> weyl_sums(const HardyExpr& a, int64_t N, int K) {
    SequenceEvaluator ev(a);
    std::vector<cplx> S(K, 0.0);
    for (int64_t n = 1; n <= N; ++n) {
        DD v = ev.value(n);
        for (int k = 1; k <= K; ++k) S[k - 1] += expi(frac(v * DD::from_int(k)));
    }
    std::vector<double> out;
    for (auto& z : S) out.push_back(std::abs(z) / static_cast<double>(N));
    return out;
}

WeylRow weyl_check(const std::string& expr, int64_t N, int K, double low, double high) {
    WeylRow row;
    row.expr = expr;
    HardyExpr a = HardyExpr::parse(expr);
    row.classification = classify(a).name();
    row.verdict = is_equidistributed(a);
    row.sums = weyl_sums(a, N, K);
    row.max_sum = *std::max_element(row.sums.begin(), row.sums.end());
    row.agree = row.verdict ? row.max_sum <= low : row.max_sum >= high;
    return row;
}

// ---- random finite instances ----

namespace {

std::mt19937_64 instance_rng(uint64_t seed, size_t index, uint64_t salt) {
    std::seed_seq sq{seed, static_cast<uint64_t>(index), salt};
    return std::mt19937_64(sq);
}

std::vector<cplx> random_unit_table(std::mt19937_64& rng, int64_t n) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& x : v) {
        x = {U(rng), U(rng)};
        if (std::abs(x) > 1) x /= std::abs(x);
    }
    return v;
}

int64_t pick(std::mt19937_64& rng, int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

System random_finite_system(std::mt19937_64& rng, const std::vector<int64_t>& moduli, int ell) {
    std::vector<std::vector<int64_t>> sh(ell);
    for (auto& s : sh)
        for (auto m : moduli) s.push_back(pick(rng, 0, m - 1));
    return System::finite_abelian(moduli, sh);
}

std::vector<int64_t> random_generator(std::mt19937_64& rng, int ell) {
    std::vector<int64_t> g(ell);
    do {
        for (auto& x : g) x = pick(rng, -2, 2);
    } while (std::all_of(g.begin(), g.end(), [](int64_t x) { return x == 0; }));
    return g;
}

// integer generators, occasionally with a half-integer entry
SubgroupSpec random_subgroup(std::mt19937_64& rng, int ell, bool allow_rational) {
    int k = pick(rng, 0, 3) == 0 ? 2 : 1;
    std::vector<std::vector<TaggedReal>> gens;
    bool rational = allow_rational && pick(rng, 0, 5) == 0;
    for (int i = 0; i < k; ++i) {
        auto g = random_generator(rng, ell);
        std::vector<TaggedReal> v;
        for (auto x : g) v.push_back(TaggedReal(Rat(x)));
        if (rational) v[pick(rng, 0, ell - 1)] = TaggedReal(Rat(2 * pick(rng, -1, 1) + 1, 2));
        gens.push_back(std::move(v));
    }
    return SubgroupSpec::of(std::move(gens));
}

const std::vector<std::vector<int64_t>>& props_spaces() {
    static const std::vector<std::vector<int64_t>> s = {{9}, {12}, {15}, {4, 3}, {10}, {6, 6}, {8}, {7, 7}, {5, 5}, {3, 3, 3}};
    return s;
}

}  // namespace

PropsInstance props_instance(uint64_t seed, size_t index) {
    auto rng = instance_rng(seed, index, 1);
    PropsInstance in;
    if (index == 0) {
        in.label = "Z/9, G = <1>, 2G";
        in.sys = System::finite_cyclic(9, {1});
        in.f = Observable::table(in.sys.space(), random_unit_table(rng, 9));
        in.groups = {SubgroupSpec::integer({{1}})};
        in.extra = SubgroupSpec::integer({{1}});
        return in;
    }
    auto& moduli = props_spaces()[index % props_spaces().size()];
    int ell = static_cast<int>(pick(rng, 1, 2));
    in.sys = random_finite_system(rng, moduli, ell);
    int s = static_cast<int>(pick(rng, 1, 2));
    for (int i = 0; i < s; ++i) in.groups.push_back(random_subgroup(rng, ell, true));
    in.extra = random_subgroup(rng, ell, true);
    in.f = Observable::table(in.sys.space(), random_unit_table(rng, in.sys.space()->states()));
    in.label = in.sys.str();
    for (auto& g : in.groups) in.label += " " + g.str();
    in.label += " extra " + in.extra.str();
    return in;
}

GcsInstance gcs_instance(uint64_t seed, size_t index) {
    auto rng = instance_rng(seed, index, 2);
    GcsInstance in;
    auto& moduli = props_spaces()[index % props_spaces().size()];
    int ell = static_cast<int>(pick(rng, 1, 2));
    in.sys = random_finite_system(rng, moduli, ell);
    int s = static_cast<int>(pick(rng, 1, 2));
    for (int i = 0; i < s; ++i) in.groups.push_back(random_subgroup(rng, ell, true));
    int64_t n = in.sys.space()->states();
    in.f = Observable::table(in.sys.space(), random_unit_table(rng, n));
    for (int e = 1; e < (1 << s); ++e) in.f_eps.push_back(Observable::table(in.sys.space(), random_unit_table(rng, n)));
    in.label = in.sys.str();
    for (auto& g : in.groups) in.label += " " + g.str();
    return in;
}

namespace {

const std::vector<std::vector<int64_t>>& concat_spaces() {
    static const std::vector<std::vector<int64_t>> s = {
        {256}, {16, 16}, {8, 32}, {4, 4, 16}, {2, 2, 2, 2, 2, 2, 2, 2}, {6, 6}, {12, 12}, {15, 15}, {5, 5, 5},
        {7, 7}, {3, 3, 3, 3, 3}, {2, 4, 8, 4}, {10, 10}, {9, 9, 3}, {14, 14}, {13, 13}, {120}, {2, 128},
        {8, 8}, {4, 4, 4, 4}};
    return s;
}

}  // namespace

ConcatInstance concat_instance(uint64_t seed, size_t index) {
    auto rng = instance_rng(seed, index, 3);
    ConcatInstance in;
    auto& moduli = concat_spaces()[index % concat_spaces().size()];
    int ell = static_cast<int>(pick(rng, 2, 3));
    in.sys = random_finite_system(rng, moduli, ell);
    in.H = random_subgroup(rng, ell, true);
    in.Hp = random_subgroup(rng, ell, true);
    if (index >= 520) in.G_list.push_back(random_subgroup(rng, ell, false));
    const SpaceCPtr& sp = in.sys.space();
    int64_t n = sp->states();
    // sparse random character coefficients, then remove the factor of G_list + {H + H'}
    std::vector<cplx> c(n, 0.0);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto& x : c)
        if (pick(rng, 0, 2) == 0) x = {U(rng), U(rng)};
    Observable f = from_character_coefficients(sp, c);
    auto groups = in.G_list;
    groups.push_back(in.H.sum(in.Hp));
    in.f = f - factor_project(in.sys, f, groups);
    in.label = in.sys.str() + " H " + in.H.str() + " H' " + in.Hp.str();
    for (auto& g : in.G_list) in.label += " G " + g.str();
    return in;
}

ConcatRow concat_check(const ConcatInstance& in, double tol) {
    ConcatRow row;
    row.label = in.label;
    row.order = in.sys.space()->states();
    row.f_norm = l2_norm(in.f);
    try {
        auto [g1, g2] = concat_decompose(in.sys, in.f, in.G_list, in.H, in.Hp);
        auto gh = in.G_list, ghp = in.G_list;
        gh.push_back(in.H);
        ghp.push_back(in.Hp);
        row.g1_seminorm = box_seminorm(in.sys, g1, gh).value;
        row.g2_seminorm = box_seminorm(in.sys, g2, ghp).value;
        row.sum_error = l2_distance(g1 + g2, in.f);
        row.ok = row.g1_seminorm <= tol && row.g2_seminorm <= tol && row.sum_error <= tol;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

// ---- rotations ----

namespace {

// sum of e(k.x) over 0 < |k|_inf <= 2
Observable frequency_family(const SpaceCPtr& sp) {
    int64_t d = sp->dim;
    std::vector<std::pair<std::vector<int64_t>, cplx>> terms;
    std::vector<int64_t> k(d, -2);
    for (;;) {
        if (std::any_of(k.begin(), k.end(), [](int64_t x) { return x != 0; })) terms.push_back({k, 1.0});
        int64_t i = 0;
        while (i < d && ++k[i] > 2) k[i++] = -2;
        if (i == d) break;
    }
    return Observable::trig(sp, terms);
}

RotationConfig rotation_config(std::string label, int64_t d, std::vector<std::vector<TaggedReal>> alphas) {
    RotationConfig c;
    c.label = std::move(label);
    c.sys = System::torus_rotation(d, std::move(alphas));
    Observable f = frequency_family(c.sys.space());
    c.f.assign(c.sys.ell(), f);
    return c;
}

}  // namespace

std::vector<RotationConfig> bergelson_berend_matrix() {
    TaggedReal r2 = TaggedReal::sqrt_of(2), r3 = TaggedReal::sqrt_of(3), r5 = TaggedReal::sqrt_of(5),
               r7 = TaggedReal::sqrt_of(7), h = TaggedReal(Rat(1, 2));
    return {
        rotation_config("l=1 sqrt2", 1, {{r2}}),
        rotation_config("l=1 1/2", 1, {{h}}),
        rotation_config("l=2 sqrt2, sqrt3", 1, {{r2}, {r3}}),
        rotation_config("l=2 sqrt2, 2sqrt2", 1, {{r2}, {TaggedReal(2) * r2}}),
        rotation_config("l=2 sqrt2, sqrt2+1/2", 1, {{r2}, {r2 + h}}),
        rotation_config("l=2 sqrt2, sqrt2", 1, {{r2}, {r2}}),
        rotation_config("l=2 sqrt2, -sqrt2", 1, {{r2}, {TaggedReal(-1) * r2}}),
        rotation_config("l=2 sqrt2, sqrt3+1/2", 1, {{r2}, {r3 + h}}),
        rotation_config("l=2 d=2 (sqrt2,sqrt3), (sqrt5,sqrt7)", 2, {{r2, r3}, {r5, r7}}),
        rotation_config("l=2 d=2 (sqrt2,1/2), (sqrt3,0)", 2, {{r2, h}, {r3, TaggedReal(0)}}),
        rotation_config("l=3 sqrt2, sqrt3, sqrt5", 1, {{r2}, {r3}, {r5}}),
        rotation_config("l=3 sqrt2, sqrt3, sqrt2+sqrt3", 1, {{r2}, {r3}, {r2 + r3}}),
    };
}

RotationRow bergelson_berend_check(const RotationConfig& c, int64_t N, double eps) {
    RotationRow row;
    row.label = c.label;
    ReportOptions opt;
    opt.N_grid = {N};
    int ell = c.sys.ell();
    std::vector<HardyExpr> a(ell, HardyExpr::parse("x"));
    row.joint = joint_ergodicity_report(c.sys, a, c.f, opt).final_residual();
    bool ok = true;
    for (int i = 0; i < ell; ++i)
        for (int j = i + 1; j < ell; ++j) {
            double r = difference_ergodicity_report(c.sys, a, i, j, c.f[i], opt).final_residual();
            row.difference.push_back(r);
            ok = ok && r <= eps;
        }
    row.product = product_ergodicity_report(c.sys, a, c.f, opt).final_residual();
    row.conditions = ok && row.product <= eps;
    row.joint_pass = row.joint <= eps;
    row.agree = row.conditions == row.joint_pass;
    return row;
}

// ---- synthetic sequences ----

std::vector<SyntheticSequence> synthetic_sequences(int64_t N) {
    auto e = [](double t) { return expi(frac(DD(t))); };
    auto ed = [](const DD& t) { return expi(frac(t)); };
    const DD S2 = TaggedReal::sqrt_of(2).to_dd(), S3 = TaggedReal::sqrt_of(3).to_dd(),
             S5 = TaggedReal::sqrt_of(5).to_dd();
    std::vector<SyntheticSequence> out;
    auto add = [&](std::string name, cplx L, auto&& gen) {
        SyntheticSequence s{std::move(name), std::vector<cplx>(N), L};
        for (int64_t n = 1; n <= N; ++n) s.v[n - 1] = gen(n);
        out.push_back(std::move(s));
    };
    add("1 + n^-1/2", 1.0, [](int64_t n) { return cplx(1.0 + 1.0 / std::sqrt(double(n))); });
    add("2 + 1/log(n+1)", 2.0, [](int64_t n) { return cplx(2.0 + 1.0 / std::log(double(n) + 1.0)); });
    add("e(n sqrt2)", 0.0, [&](int64_t n) { return ed(DD::from_int(n) * S2); });
    add("(-1)^n", 0.0, [](int64_t n) { return cplx(n % 2 ? -1.0 : 1.0); });
    add("1/2 + e(n^2 sqrt3)", 0.5, [&](int64_t n) { return 0.5 + ed(frac(DD::from_int(n) * DD::from_int(n) * S3)); });
    add("e(sqrt n)", 0.0, [&](int64_t n) { return e(std::sqrt(double(n))); });
    add("i + e(n^{3/2})", cplx(0, 1), [&](int64_t n) {
        DD x = DD::from_int(n);
        return cplx(0, 1) + ed(x * sqrt(x));
    });
    add("[3 | n]", 1.0 / 3.0, [](int64_t n) { return cplx(n % 3 == 0 ? 1.0 : 0.0); });
    add("e(n log n)", 0.0, [&](int64_t n) { return ed(DD::from_int(n) * log(DD::from_int(n))); });
    add("e(n/7 + n sqrt5)", 0.0, [&](int64_t n) { return ed(DD::from_int(n) * (S5 + DD(1.0) / DD(7.0))); });
    add("sin(n)^2", 0.5, [](int64_t n) { return cplx(std::sin(double(n)) * std::sin(double(n))); });
    add("(-1)^floor(sqrt n)", 0.0, [](int64_t n) {
        int64_t r = static_cast<int64_t>(std::sqrt(double(n)));
        while (r * r > n) --r;
        while ((r + 1) * (r + 1) <= n) ++r;
        return cplx(r % 2 ? -1.0 : 1.0);
    });
    {
        std::mt19937_64 rng(12345);
        add("random signs", 0.0, [&](int64_t) { return cplx(rng() & 1 ? 1.0 : -1.0); });
    }
    {
        std::mt19937_64 rng(54321);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        add("random uniform", 0.5, [&](int64_t) { return cplx(U(rng)); });
    }
    add("3 + n^-1/10", 3.0, [](int64_t n) { return cplx(3.0 + std::pow(double(n), -0.1)); });
    add("e(log(n)^2)", 0.0, [&](int64_t n) {
        DD l = log(DD::from_int(n));
        return ed(l * l);
    });
    add("floor(n sqrt2) mod 2", 0.5, [&](int64_t n) {
        DD x = DD::from_int(n) * S2;
        return cplx(static_cast<int64_t>(floor(x).hi) % 2 ? 1.0 : 0.0);
    });
    add("Thue-Morse", 0.0, [](int64_t n) { return cplx(__builtin_popcountll(n) % 2 ? -1.0 : 1.0); });
    add("e(n^2/2 + n sqrt5)", 0.0, [&](int64_t n) {
        return cplx(n % 2 ? -1.0 : 1.0) * ed(DD::from_int(n) * S5);
    });
    add("1/4 + (-1)^n/log(n+1)", 0.25, [](int64_t n) {
        return cplx(0.25 + (n % 2 ? -1.0 : 1.0) / std::log(double(n) + 1.0));
    });
    return out;
}

DyadicRow dyadic_lemma_check(const SyntheticSequence& s, double factor) {
    DyadicRow row;
    row.name = s.name;
    int64_t N = static_cast<int64_t>(s.v.size());
    row.cesaro_residual = std::abs(scheme_average(s.v, Scheme::cesaro(), N) - s.limit);
    row.ratio_2 = dyadic_check(s.v, s.limit, dyadic_points("2^N", N)).worst_ratio;
    row.ratio_15 = dyadic_check(s.v, s.limit, dyadic_points("floor(1.5^N)", N)).worst_ratio;
    row.ok = row.ratio_2 <= factor && row.ratio_15 <= factor;
    return row;
}

// ---- counterexample ----

std::vector<CounterexampleRow> counterexample_demo(int64_t N_cat, int64_t N_rot, double joint_max, double rot_min,
                                                   uint64_t seed) {
    std::vector<CounterexampleRow> out;
    std::vector<HardyExpr> pair{HardyExpr::parse("x"), HardyExpr::parse("x+log_2(x)")};
    auto cat = System::toral_automorphism({Mat2{2, 1, 1, 1}}, {{1}, {1}});
    auto sp = cat.space();
    auto f = Observable::trig(sp, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, 0.5}});
    auto g = Observable::trig(sp, {{{1, 1}, 1.0}, {{0, -1}, cplx(0, 1)}});
    ReportOptions oc;
    oc.N_grid = {N_cat};
    oc.seed = seed;
    auto row = [&](std::string name, double r, std::string expect, double t) {
        bool ok = expect == "<=" ? r <= t : expect == ">=" ? r >= t : expect == ">" ? r > t : true;
        out.push_back({std::move(name), r, std::move(expect), t, ok});
    };
    row("cat joint", joint_ergodicity_report(cat, pair, {f, g}, oc).final_residual(), "<=", joint_max);
    row("cat product", product_ergodicity_report(cat, pair, {f, g}, oc).final_residual(), "<=", joint_max);
    row("cat difference", difference_ergodicity_report(cat, pair, 0, 1, f, oc).final_residual(), "logged", 0);

    ReportOptions orot;
    orot.N_grid = {N_rot};
    auto rot1 = System::torus_rotation(1, {{TaggedReal::sqrt_of(2) - TaggedReal(1)}});
    auto e1 = Observable::character(rot1.space(), {1});
    row("rotation floor(log2 n)", single_ergodicity_report(rot1, 0, HardyExpr::parse("log_2(x)"), e1, orot).final_residual(),
        ">=", rot_min);
    auto a = TaggedReal::sqrt_of(2) - TaggedReal(1);
    auto rot2 = System::torus_rotation(1, {{a}, {a}});
    auto h1 = Observable::character(rot2.space(), {1}), h2 = Observable::character(rot2.space(), {-1});
    row("rotation difference", difference_ergodicity_report(rot2, pair, 0, 1, h1, orot).final_residual(), ">",
        joint_max);
    row("rotation joint", joint_ergodicity_report(rot2, pair, {h1, h2}, orot).final_residual(), ">", joint_max);
    return out;
}

// ---- runner ----

bool RecipeResult::pass() const {
    if (!summary_pass) return false;
    for (auto& r : instances)
        if (!r.value("pass", false)) return false;
    return true;
}

std::vector<std::string> recipe_kinds() {
    return {"expsum-verify", "equi-classify", "average-run", "seminorm-compute", "props-run", "counterexample-demo",
            "concat-oracle"};
}

namespace {

template <class T>
T param(const json& p, const char* key, T def) {
    if (!p.contains(key)) return def;
    try {
        return p.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("params.") + key + ": " + e.what());
    }
}

int64_t param_n(const json& p, const char* key, int64_t def) {
    if (!p.contains(key)) return def;
    auto& v = p.at(key);
    if (v.is_number_integer()) return v.get<int64_t>();
    // 1e6 style literals
    if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()) && v.get<double>() < 9e18)
        return static_cast<int64_t>(v.get<double>());
    throw ConfigError(std::string("params.") + key + ": expected an integer");
}

std::vector<size_t> selection(size_t count, const std::vector<size_t>* only) {
    std::vector<size_t> idx;
    if (only) {
        for (auto i : *only)
            if (i < count) idx.push_back(i);
    } else {
        for (size_t i = 0; i < count; ++i) idx.push_back(i);
    }
    return idx;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
    return o + "\"";
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

RecipeResult run_expsum(const json& p, const std::vector<size_t>* only) {
    check_keys(p, {"N", "N2", "tol", "ratio", "cases"}, "params");
    int64_t N1 = param_n(p, "N", 1000000), N2 = param_n(p, "N2", 4 * N1);
    double tol = param(p, "tol", 0.05), ratio = param(p, "ratio", 0.6);
    auto suite = bundled_oracle_suite();
    if (p.contains("cases")) {
        std::vector<CaseKind> keep;
        for (auto& c : p.at("cases")) {
            try {
                keep.push_back(case_from_name(c.get<std::string>()));
            } catch (const std::exception& e) {
                throw ConfigError(std::string("params.cases: ") + e.what());
            }
        }
        std::erase_if(suite, [&](const OracleTuple& t) { return std::find(keep.begin(), keep.end(), t.c.kind) == keep.end(); });
    }
    auto idx = selection(suite.size(), only);
    std::vector<OracleTuple> sub;
    for (auto i : idx) sub.push_back(suite[i]);
    auto rows = run_oracle_suite(sub, N1, N2);
    RecipeResult res;
    std::string csv = "index,case,label,closed_re,closed_im,brute_re,brute_im,abs_err,abs_err_N2,exact_zero,skipped\n";
    for (size_t r = 0; r < rows.size(); ++r) {
        auto& w = rows[r];
        res.instances.push_back({{"index", idx[r]},
                                 {"case", case_name(w.kind)},
                                 {"label", w.label},
                                 {"closed", complex_to_json(w.closed)},
                                 {"brute", complex_to_json(w.brute1)},
                                 {"brute_N2", complex_to_json(w.brute2)},
                                 {"abs_err", w.err1},
                                 {"abs_err_N2", w.err2},
                                 {"conditions_fired", w.fired},
                                 {"exact_zero", w.exact_zero},
                                 {"skipped", w.skipped},
                                 {"pass", w.err1 <= tol}});
        csv += std::to_string(idx[r]) + "," + case_name(w.kind) + "," + csv_escape(w.label) + "," + num(w.closed.real()) +
               "," + num(w.closed.imag()) + "," + num(w.brute1.real()) + "," + num(w.brute1.imag()) + "," +
               num(w.err1) + "," + num(w.err2) + "," + (w.exact_zero ? "1" : "0") + "," + std::to_string(w.skipped) +
               "\n";
    }
    res.csv["expsum"] = csv;
    json cases = json::array();
    if (!only) {
        for (auto& s : summarize_oracle(rows, tol, ratio, 1)) {
            cases.push_back({{"case", case_name(s.kind)},
                             {"tuples", s.tuples},
                             {"max_abs_err", s.max_err1},
                             {"aggregate_ratio", s.aggregate_ratio},
                             {"ratio_pass", s.ratio_pass},
                             {"pass", s.pass}});
            res.summary_pass = res.summary_pass && s.pass;
        }
    }
    res.summary = {{"N", N1}, {"N2", N2}, {"tol", tol}, {"ratio", ratio}, {"cases", cases}};
    return res;
}

RecipeResult run_equi(const json& p, const std::vector<size_t>* only) {
    check_keys(p, {"expressions", "N", "K", "low", "high"}, "params");
    int64_t N = param_n(p, "N", 1000000);
    int K = static_cast<int>(param_n(p, "K", 5));
    double low = param(p, "low", 0.05), high = param(p, "high", 0.5);
    std::vector<std::string> exprs = p.contains("expressions") ? param(p, "expressions", std::vector<std::string>{})
                                                               : weyl_corpus();
    for (auto& e : exprs) expr_from_json(e);  // ConfigError on bad input before any work
    RecipeResult res;
    std::string csv = "index,expr,classification,verdict,max_weyl_sum,agree\n";
    int disagree = 0;
    for (auto i : selection(exprs.size(), only)) {
        auto row = weyl_check(exprs[i], N, K, low, high);
        disagree += !row.agree;
        res.instances.push_back({{"index", i},
                                 {"expr", row.expr},
                                 {"classification", row.classification},
                                 {"equidistributed", row.verdict},
                                 {"weyl_sums", row.sums},
                                 {"max_weyl_sum", row.max_sum},
                                 {"pass", row.agree}});
        csv += std::to_string(i) + "," + csv_escape(row.expr) + "," + row.classification + "," +
               (row.verdict ? "1" : "0") + "," + num(row.max_sum) + "," + (row.agree ? "1" : "0") + "\n";
    }
    res.csv["equi"] = csv;
    res.summary = {{"N", N}, {"K", K}, {"low", low}, {"high", high}, {"disagreements", disagree}};
    return res;
}

RecipeResult run_average_explicit(const json& p, const RunContext& ctx) {
    check_keys(p, {"system", "sequences", "observables", "report", "pair", "transformation", "N_grid", "mc_samples",
                   "expect_max", "expect_min"},
               "params");
    if (!p.contains("system") || !p.contains("sequences") || !p.contains("observables"))
        throw ConfigError("params: average-run needs system, sequences and observables (or a recipe)");
    System sys = system_from_json(p.at("system"));
    std::vector<HardyExpr> a;
    for (auto& s : p.at("sequences")) a.push_back(expr_from_json(s));
    std::vector<Observable> f;
    for (auto& o : p.at("observables")) f.push_back(observable_from_json(o, sys.space()));
    ReportOptions opt;
    opt.seed = ctx.seed;
    if (p.contains("N_grid")) {
        opt.N_grid.clear();
        for (auto& n : p.at("N_grid")) {
            if (!n.is_number()) throw ConfigError("params.N_grid: expected numbers");
            opt.N_grid.push_back(static_cast<int64_t>(n.get<double>()));
        }
    }
    opt.mc_samples = param_n(p, "mc_samples", opt.mc_samples);
    std::string kind = param<std::string>(p, "report", "joint");
    AverageReport rep;
    try {
        if (kind == "joint") {
            if (a.size() != f.size() || static_cast<int>(a.size()) != sys.ell())
                throw ConfigError("params: joint report needs one sequence and observable per transformation");
            rep = joint_ergodicity_report(sys, a, f, opt);
        } else if (kind == "product") {
            rep = product_ergodicity_report(sys, a, f, opt);
        } else if (kind == "difference") {
            auto pr = param(p, "pair", std::vector<int>{0, 1});
            if (pr.size() != 2) throw ConfigError("params.pair: expected [i, j]");
            rep = difference_ergodicity_report(sys, a, pr[0], pr[1], f.at(0), opt);
        } else if (kind == "single") {
            int j = param(p, "transformation", 0);
            rep = single_ergodicity_report(sys, j, a.at(0), f.at(0), opt);
        } else {
            throw ConfigError("params.report: expected joint, difference, product or single");
        }
    } catch (const FrequencyOverflow& e) {
        throw ResourceError(e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    RecipeResult res;
    json r = to_json(rep);
    bool pass = true;
    if (p.contains("expect_max")) pass = pass && rep.final_residual() <= p.at("expect_max").get<double>();
    if (p.contains("expect_min")) pass = pass && rep.final_residual() >= p.at("expect_min").get<double>();
    r["index"] = 0;
    r["pass"] = pass;
    res.instances.push_back(r);
    res.csv["average"] = report_csv(rep);
    res.summary = {{"report", kind}, {"final_residual", rep.final_residual()}};
    return res;
}

RecipeResult run_average(const json& p, const RunContext& ctx, const std::vector<size_t>* only) {
    if (!p.contains("recipe")) return run_average_explicit(p, ctx);
    auto recipe = p.at("recipe").get<std::string>();
    RecipeResult res;
    if (recipe == "bergelson-berend") {
        check_keys(p, {"recipe", "N", "eps"}, "params");
        int64_t N = param_n(p, "N", 1000000);
        double eps = param(p, "eps", 0.05);
        auto mat = bergelson_berend_matrix();
        std::string csv = "index,label,joint,product,max_difference,conditions,joint_pass,agree\n";
        for (auto i : selection(mat.size(), only)) {
            auto r = bergelson_berend_check(mat[i], N, eps);
            double md = r.difference.empty() ? 0.0 : *std::max_element(r.difference.begin(), r.difference.end());
            res.instances.push_back({{"index", i},
                                     {"label", r.label},
                                     {"joint", r.joint},
                                     {"difference", r.difference},
                                     {"product", r.product},
                                     {"conditions", r.conditions},
                                     {"joint_pass", r.joint_pass},
                                     {"pass", r.agree}});
            csv += std::to_string(i) + "," + csv_escape(r.label) + "," + num(r.joint) + "," + num(r.product) + "," +
                   num(md) + "," + (r.conditions ? "1" : "0") + "," + (r.joint_pass ? "1" : "0") + "," +
                   (r.agree ? "1" : "0") + "\n";
        }
        res.csv["bergelson_berend"] = csv;
        res.summary = {{"recipe", recipe}, {"N", N}, {"eps", eps}};
        return res;
    }
    if (recipe == "dyadic-lemma") {
        check_keys(p, {"recipe", "N", "factor"}, "params");
        int64_t N = param_n(p, "N", int64_t(1) << 20);
        double factor = param(p, "factor", 10.0);
        auto seqs = synthetic_sequences(N);
        std::string csv = "index,name,cesaro_residual,ratio_2,ratio_1.5,pass\n";
        for (auto i : selection(seqs.size(), only)) {
            auto r = dyadic_lemma_check(seqs[i], factor);
            res.instances.push_back({{"index", i},
                                     {"name", r.name},
                                     {"cesaro_residual", r.cesaro_residual},
                                     {"ratio_2", r.ratio_2},
                                     {"ratio_1.5", r.ratio_15},
                                     {"pass", r.ok}});
            csv += std::to_string(i) + "," + csv_escape(r.name) + "," + num(r.cesaro_residual) + "," + num(r.ratio_2) +
                   "," + num(r.ratio_15) + "," + (r.ok ? "1" : "0") + "\n";
        }
        res.csv["dyadic"] = csv;
        res.summary = {{"recipe", recipe}, {"N", N}, {"factor", factor}};
        return res;
    }
    throw ConfigError("params.recipe: expected bergelson-berend or dyadic-lemma");
}

RecipeResult run_seminorm(const json& p) {
    check_keys(p, {"system", "f", "groups", "plus", "expect_max", "expect_min"}, "params");
    if (!p.contains("system") || !p.contains("f") || !p.contains("groups"))
        throw ConfigError("params: seminorm-compute needs system, f and groups");
    System sys = system_from_json(p.at("system"));
    Observable f = observable_from_json(p.at("f"), sys.space());
    auto groups = groups_from_json(p.at("groups"), sys.ell());
    bool plus = param(p, "plus", false);
    SeminormValue v;
    try {
        v = plus ? box_seminorm_plus(sys, f, groups) : box_seminorm(sys, f, groups);
    } catch (const FrequencyOverflow& e) {
        throw ResourceError(e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    RecipeResult res;
    json r = to_json(v);
    bool pass = !v.nonconvergence;
    if (p.contains("expect_max")) pass = pass && v.value <= p.at("expect_max").get<double>();
    if (p.contains("expect_min")) pass = pass && v.value >= p.at("expect_min").get<double>();
    r["index"] = 0;
    r["plus"] = plus;
    r["pass"] = pass;
    res.instances.push_back(r);
    res.csv["seminorm"] = "value,exactness,error,nonconvergence\n" + num(v.value) + "," + r["exactness"].get<std::string>() +
                          "," + num(v.error) + "," + (v.nonconvergence ? "1" : "0") + "\n";
    res.summary = {{"plus", plus}, {"value", v.value}};
    return res;
}

RecipeResult run_props(const json& p, const RunContext& ctx, const std::vector<size_t>* only) {
    check_keys(p, {"count", "gcs", "tol"}, "params");
    size_t np = static_cast<size_t>(param_n(p, "count", 100)), ng = static_cast<size_t>(param_n(p, "gcs", 100));
    double tol = param(p, "tol", 1e-9);
    RecipeResult res;
    std::string csv = "index,type,label,pass,detail\n";
    int part_v = 0;
    for (auto i : selection(np + ng, only)) {
        json rec;
        if (i < np) {
            auto in = props_instance(ctx.seed, i);
            auto rep = property_suite(in.sys, in.f, in.groups, in.extra, tol);
            part_v += rep.part_v_applicable;
            rec = {{"index", i},
                   {"type", "properties"},
                   {"label", in.label},
                   {"symmetry_gap", rep.symmetry_gap},
                   {"chain", rep.chain},
                   {"chain_violation", rep.chain_violation},
                   {"subgroup_violation", rep.subgroup_violation},
                   {"part_v_applicable", rep.part_v_applicable},
                   {"part_v_gap", rep.part_v_gap},
                   {"rescaling_ratio", rep.rescaling_ratio},
                   {"violations", rep.violations},
                   {"pass", rep.ok()}};
            csv += std::to_string(i) + ",properties," + csv_escape(in.label) + "," + (rep.ok() ? "1" : "0") + "," +
                   csv_escape(num(rep.chain_violation)) + "\n";
        } else {
            auto in = gcs_instance(ctx.seed, i - np);
            auto g = gcs_check(in.sys, in.f, in.f_eps, in.groups);
            rec = {{"index", i}, {"type", "gcs"}, {"label", in.label}, {"lhs", g.lhs}, {"rhs", g.rhs},
                   {"sharp", g.sharp}, {"pass", g.holds}};
            csv += std::to_string(i) + ",gcs," + csv_escape(in.label) + "," + (g.holds ? "1" : "0") + "," +
                   num(g.rhs - g.lhs) + "\n";
        }
        res.instances.push_back(rec);
    }
    res.csv["props"] = csv;
    res.summary = {{"count", np}, {"gcs", ng}, {"tol", tol}, {"part_v_instances", part_v}};
    // the G vs 2G instance must exercise part (v)
    if (!only) res.summary_pass = np == 0 || part_v > 0;
    return res;
}

RecipeResult run_counterexample(const json& p, const RunContext& ctx, const std::vector<size_t>* only) {
    check_keys(p, {"N_cat", "N_rot", "joint_max", "rot_min"}, "params");
    auto rows = counterexample_demo(param_n(p, "N_cat", 100000), param_n(p, "N_rot", 1000000),
                                    param(p, "joint_max", 0.1), param(p, "rot_min", 0.3), ctx.seed);
    RecipeResult res;
    std::string csv = "index,name,residual,expect,threshold,pass\n";
    for (auto i : selection(rows.size(), only)) {
        auto& r = rows[i];
        res.instances.push_back({{"index", i},
                                 {"name", r.name},
                                 {"residual", r.residual},
                                 {"expect", r.expect},
                                 {"threshold", r.threshold},
                                 {"pass", r.ok}});
        csv += std::to_string(i) + "," + r.name + "," + num(r.residual) + "," + r.expect + "," + num(r.threshold) + "," +
               (r.ok ? "1" : "0") + "\n";
    }
    res.csv["counterexample"] = csv;
    res.summary = {{"pair", json::array({"x", "x+log_2(x)"})}};
    return res;
}

RecipeResult run_concat(const json& p, const RunContext& ctx, const std::vector<size_t>* only) {
    check_keys(p, {"count", "tol"}, "params");
    size_t count = static_cast<size_t>(param_n(p, "count", 540));
    double tol = param(p, "tol", 1e-9);
    RecipeResult res;
    std::string csv = "index,order,label,f_norm,g1_seminorm,g2_seminorm,pass\n";
    int nontrivial = 0;
    for (auto i : selection(count, only)) {
        auto r = concat_check(concat_instance(ctx.seed, i), tol);
        nontrivial += r.f_norm > 1e-9;
        json rec = {{"index", i},          {"order", r.order},   {"label", r.label},
                    {"f_norm", r.f_norm},  {"g1_seminorm", r.g1_seminorm}, {"g2_seminorm", r.g2_seminorm},
                    {"sum_error", r.sum_error}, {"pass", r.ok}};
        if (!r.error.empty()) rec["error"] = r.error;
        res.instances.push_back(rec);
        csv += std::to_string(i) + "," + std::to_string(r.order) + "," + csv_escape(r.label) + "," + num(r.f_norm) +
               "," + num(r.g1_seminorm) + "," + num(r.g2_seminorm) + "," + (r.ok ? "1" : "0") + "\n";
    }
    res.csv["concat"] = csv;
    res.summary = {{"count", count}, {"tol", tol}, {"nonzero_f", nontrivial}};
    return res;
}

}  // namespace

RecipeResult run_recipe(const std::string& kind, const json& params, const RunContext& ctx,
                        const std::vector<size_t>* only) {
    const json& p = params.is_null() ? json::object() : params;
    if (!p.is_object()) throw ConfigError("params: expected an object");
    if (kind == "expsum-verify") return run_expsum(p, only);
    if (kind == "equi-classify") return run_equi(p, only);
    if (kind == "average-run") return run_average(p, ctx, only);
    if (kind == "seminorm-compute") return run_seminorm(p);
    if (kind == "props-run") return run_props(p, ctx, only);
    if (kind == "counterexample-demo") return run_counterexample(p, ctx, only);
    if (kind == "concat-oracle") return run_concat(p, ctx, only);
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

}  // namespace hergo
