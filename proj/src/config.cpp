#include "hergo/config.hpp"

#include <sstream>

namespace hergo {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto& [k, v] : obj.items()) {
        bool ok = false;
        for (auto* a : allowed) ok = ok || k == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

namespace {

int64_t get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<int64_t>();
}

const json& need(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    return obj.at(key);
}

bool is_tagged_scalar(const json& j) {
    return j.is_number() || j.is_string() || (j.is_array() && !j.empty() && j[0].is_string());
}

std::vector<int64_t> int_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an integer array");
    std::vector<int64_t> v;
    for (auto& x : j) v.push_back(get_int(x, where));
    return v;
}

Mat2 mat_from_json(const json& j, const std::string& where) {
    auto v = int_vector(j, where);
    if (v.size() != 4) throw ConfigError(where + ": a 2x2 matrix is [a, b, c, d]");
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace

TaggedReal scalar_from_json(const json& j) {
    if (j.is_number_integer()) return TaggedReal(Rat(j.get<int64_t>()));
    if (j.is_number_float()) return TaggedReal::flagged(DD(j.get<double>()), true);
    if (j.is_string()) {
        try {
            return parse_tagged(j.get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError("scalar '" + j.get<std::string>() + "': " + e.what());
        }
    }
    if (j.is_array() && !j.empty() && j[0].is_string()) {
        auto tag = j[0].get<std::string>();
        if (tag == "sqrt" && j.size() == 2) return TaggedReal::sqrt_of(get_int(j[1], "sqrt"));
        if (tag == "rat" && j.size() == 3) return TaggedReal(Rat(get_int(j[1], "rat"), get_int(j[2], "rat")));
        if (tag == "quad" && j.size() == 4)
            return TaggedReal::quad(scalar_from_json(j[1]).a(), scalar_from_json(j[2]).a(), get_int(j[3], "quad"));
        throw ConfigError("unknown scalar form " + j.dump());
    }
    throw ConfigError("expected a scalar, got " + j.dump());
}

cplx complex_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("expected a complex number, got " + j.dump());
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

HardyExpr expr_from_json(const json& j) {
    if (!j.is_string()) throw ConfigError("expected an expression string, got " + j.dump());
    try {
        return HardyExpr::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError("expression '" + j.get<std::string>() + "': " + e.what());
    }
}

System system_from_json(const json& j) {
    const std::string w = "system";
    if (!j.is_object()) throw ConfigError(w + ": expected an object");
    auto type = need(j, "type", w).get<std::string>();
    try {
        if (type == "finite_cyclic") {
            check_keys(j, {"type", "M", "shifts"}, w);
            return System::finite_cyclic(get_int(need(j, "M", w), w), int_vector(need(j, "shifts", w), w));
        }
        if (type == "finite_abelian") {
            check_keys(j, {"type", "moduli", "shifts"}, w);
            std::vector<std::vector<int64_t>> sh;
            for (auto& s : need(j, "shifts", w)) sh.push_back(int_vector(s, w));
            return System::finite_abelian(int_vector(need(j, "moduli", w), w), sh);
        }
        if (type == "torus_rotation") {
            check_keys(j, {"type", "d", "alphas"}, w);
            int64_t d = get_int(need(j, "d", w), w);
            std::vector<std::vector<TaggedReal>> al;
            for (auto& a : need(j, "alphas", w)) {
                std::vector<TaggedReal> v;
                if (d == 1 && is_tagged_scalar(a)) {
                    v.push_back(scalar_from_json(a));
                } else {
                    if (!a.is_array()) throw ConfigError(w + ": rotation vector must be an array");
                    for (auto& x : a) v.push_back(scalar_from_json(x));
                }
                al.push_back(std::move(v));
            }
            return System::torus_rotation(d, al);
        }
        if (type == "toral_automorphism") {
            check_keys(j, {"type", "blocks", "powers"}, w);
            std::vector<Mat2> b;
            for (auto& m : need(j, "blocks", w)) b.push_back(mat_from_json(m, w));
            std::vector<std::vector<int64_t>> p;
            for (auto& x : need(j, "powers", w)) p.push_back(int_vector(x, w));
            return System::toral_automorphism(b, p);
        }
        if (type == "cat_family") {
            check_keys(j, {"type", "matrices"}, w);
            std::vector<Mat2> m;
            for (auto& x : need(j, "matrices", w)) m.push_back(mat_from_json(x, w));
            return System::cat_family(m);
        }
        if (type == "product") {
            check_keys(j, {"type", "of"}, w);
            return product_system(system_from_json(need(j, "of", w)));
        }
        if (type == "diagonal_square") {
            check_keys(j, {"type", "of"}, w);
            return diagonal_square(system_from_json(need(j, "of", w)));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(w + " (" + type + "): " + e.what());
    }
    throw ConfigError(w + ": unknown type '" + type + "'");
}

Observable observable_from_json(const json& j, const SpaceCPtr& sp) {
    const std::string w = "observable";
    if (!j.is_object() || j.size() == 0) throw ConfigError(w + ": expected an object");
    try {
        if (j.contains("sum")) {
            check_keys(j, {"sum"}, w);
            Observable acc = Observable::constant(sp, 0.0);
            for (auto& x : j.at("sum")) acc += observable_from_json(x, sp);
            return acc;
        }
        if (j.contains("constant")) {
            check_keys(j, {"constant"}, w);
            return Observable::constant(sp, complex_from_json(j.at("constant")));
        }
        if (j.contains("character")) {
            check_keys(j, {"character", "c"}, w);
            cplx c = j.contains("c") ? complex_from_json(j.at("c")) : cplx(1.0);
            return Observable::character(sp, int_vector(j.at("character"), w), c);
        }
        if (j.contains("trig")) {
            check_keys(j, {"trig"}, w);
            std::vector<std::pair<std::vector<int64_t>, cplx>> terms;
            for (auto& t : j.at("trig")) {
                check_keys(t, {"k", "c"}, w + " term");
                terms.push_back({int_vector(need(t, "k", w), w), complex_from_json(need(t, "c", w))});
            }
            return Observable::trig(sp, terms);
        }
        if (j.contains("table")) {
            check_keys(j, {"table"}, w);
            std::vector<cplx> v;
            for (auto& x : j.at("table")) v.push_back(complex_from_json(x));
            return Observable::table(sp, std::move(v));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(w + ": " + e.what());
    }
    throw ConfigError(w + ": expected one of sum, constant, character, trig, table");
}

SubgroupSpec subgroup_from_json(const json& j, int ell) {
    const std::string w = "subgroup";
    if (j.is_object()) {
        if (j.contains("standard")) {
            check_keys(j, {"standard"}, w);
            return SubgroupSpec::standard(static_cast<int>(get_int(j.at("standard"), w)));
        }
        check_keys(j, {"generators"}, w);
        return subgroup_from_json(need(j, "generators", w), ell);
    }
    if (!j.is_array() || j.empty()) throw ConfigError(w + ": expected a nonempty generator list");
    std::vector<std::vector<TaggedReal>> gens;
    for (auto& g : j) {
        if (!g.is_array()) throw ConfigError(w + ": generator must be an array");
        std::vector<TaggedReal> v;
        for (auto& x : g) v.push_back(scalar_from_json(x));
        if (static_cast<int>(v.size()) != ell)
            throw ConfigError(w + ": generator length " + std::to_string(v.size()) + " != " + std::to_string(ell));
        gens.push_back(std::move(v));
    }
    try {
        return SubgroupSpec::of(std::move(gens));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(w + ": " + e.what());
    }
}

std::vector<SubgroupSpec> groups_from_json(const json& j, int ell) {
    if (!j.is_array()) throw ConfigError("groups: expected an array of subgroups");
    std::vector<SubgroupSpec> out;
    for (auto& g : j) out.push_back(subgroup_from_json(g, ell));
    return out;
}

json to_json(const SeminormValue& v) {
    return {{"value", v.value},
            {"exactness", v.exactness == SeminormValue::Exactness::Exact ? "Exact" : "MonteCarlo"},
            {"error", v.error},
            {"nonconvergence", v.nonconvergence}};
}

json to_json(const AverageReport& r) {
    json mc = json::array();
    for (bool b : r.monte_carlo) mc.push_back(b);
    return {{"kind", r.kind},
            {"scheme", r.scheme},
            {"N_grid", r.N_grid},
            {"residuals", r.residuals},
            {"skip_fractions", r.skip_fractions},
            {"monte_carlo", mc},
            {"mc_errors", r.mc_errors},
            {"skip_fraction", r.skip_fraction},
            {"tail_monotone", r.tail_monotone},
            {"final_residual", r.final_residual()}};
}

std::string report_csv(const AverageReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "N,residual,skip_fraction\n";
    for (size_t i = 0; i < r.N_grid.size(); ++i) os << r.N_grid[i] << ',' << r.residuals[i] << ',' << r.skip_fractions[i] << '\n';
    return os.str();
}

}  // namespace hergo
