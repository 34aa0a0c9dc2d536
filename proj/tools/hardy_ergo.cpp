// hardy-ergo: experiment runner.
//
//   hardy-ergo --config cfg.json [--out dir] [--threads n] [--precision dd|mp200] [--seed u64]
//   hardy-ergo replay artifact.json
//   hardy-ergo expsum verify --case <name> --params file.json [--N 1000000]
//   hardy-ergo seminorm compute --system sys.json --f f.json --groups groups.json [--plus]
//
// Exit codes: 0 ok, 2 config, 3 assertion, 4 resource.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "hergo/reduce.hpp"
#include "hergo/recipes.hpp"

using namespace hergo;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kConfig = 2, kAssertion = 3, kResource = 4;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + p.string());
    out << s;
}

struct Options {
    std::string config, out, precision;
    int threads = 0;
    uint64_t seed = 0;
    bool seed_set = false;
};

void apply_precision(const std::string& p) {
    if (p == "dd") set_mp200_escalation(false);
    else if (p == "mp200") set_mp200_escalation(true);
    else throw ConfigError("precision must be dd or mp200");
}

// report, csv tables and the replay artifact
int emit(const json& cfg, const RecipeResult& res, const std::string& out) {
    json report = {{"version", kVersion},
                   {"kind", cfg.at("kind")},
                   {"seed", cfg.at("seed")},
                   {"precision", cfg.at("precision")},
                   {"params", cfg.at("params")},
                   {"summary", res.summary},
                   {"instances", res.instances},
                   {"pass", res.pass()}};
    json failures = json::array();
    for (auto& r : res.instances)
        if (!r.value("pass", false)) failures.push_back({{"index", r.at("index")}, {"record", r}});
    if (!res.summary_pass) failures.push_back({{"index", -1}, {"record", res.summary}});
    json artifact = {{"version", kVersion}, {"config", cfg}, {"failures", failures}};
    if (out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        fs::create_directories(out);
        std::string kind = cfg.at("kind").get<std::string>();
        write_file(fs::path(out) / (kind + ".json"), report.dump(2) + "\n");
        for (auto& [name, csv] : res.csv) write_file(fs::path(out) / (name + ".csv"), csv);
        write_file(fs::path(out) / "artifact.json", artifact.dump(2) + "\n");
        std::cerr << kind << ": " << res.instances.size() << " instances, " << failures.size() << " failures -> " << out
                  << "\n";
    }
    if (!failures.empty()) {
        for (auto& f : failures) std::cerr << "assertion failed: " << f.at("record").dump() << "\n";
        return kAssertion;
    }
    return kOk;
}

json effective_config(const Options& o) {
    if (o.config.empty()) throw ConfigError("no --config given (or HARDY_ERGO_CONFIG)");
    json cfg = read_json(o.config);
    check_keys(cfg, {"kind", "seed", "precision", "params"}, "config");
    if (!cfg.contains("kind") || !cfg.at("kind").is_string()) throw ConfigError("config: missing kind");
    auto kinds = recipe_kinds();
    if (std::find(kinds.begin(), kinds.end(), cfg.at("kind").get<std::string>()) == kinds.end())
        throw ConfigError("config: unknown kind '" + cfg.at("kind").get<std::string>() + "'");
    if (o.seed_set) cfg["seed"] = o.seed;
    if (!cfg.contains("seed")) cfg["seed"] = uint64_t{1};
    if (!cfg.at("seed").is_number_integer() || cfg.at("seed").get<int64_t>() < 0)
        throw ConfigError("config: seed must be an unsigned integer");
    cfg["seed"] = cfg.at("seed").get<uint64_t>();
    if (!o.precision.empty()) cfg["precision"] = o.precision;
    if (!cfg.contains("precision")) cfg["precision"] = "mp200";
    if (!cfg.contains("params")) cfg["params"] = json::object();
    return cfg;
}

RecipeResult execute(const json& cfg, const std::vector<size_t>* only) {
    apply_precision(cfg.at("precision").get<std::string>());
    RunContext ctx{cfg.at("seed").get<uint64_t>()};
    return run_recipe(cfg.at("kind").get<std::string>(), cfg.at("params"), ctx, only);
}

int replay(const std::string& path) {
    json art = read_json(path);
    check_keys(art, {"version", "config", "failures"}, "artifact");
    if (art.value("version", "") != kVersion) {
        std::cout << json{{"status", "VersionMismatch"}, {"artifact", art.value("version", "")}, {"binary", kVersion}}.dump()
                  << "\n";
        return kConfig;
    }
    auto& failures = art.at("failures");
    if (failures.empty()) {
        std::cout << json{{"status", "NoFailure"}}.dump() << "\n";
        return kOk;
    }
    bool summary = false;
    std::vector<size_t> only;
    for (auto& f : failures) {
        int64_t i = f.at("index").get<int64_t>();
        if (i < 0) summary = true;
        else only.push_back(static_cast<size_t>(i));
    }
    RecipeResult res = execute(art.at("config"), summary ? nullptr : &only);
    json mismatches = json::array();
    for (auto& f : failures) {
        int64_t i = f.at("index").get<int64_t>();
        json now = res.summary;
        if (i >= 0) {
            now = json();
            for (auto& r : res.instances)
                if (r.at("index").get<int64_t>() == i) now = r;
        }
        if (now.dump() != f.at("record").dump()) mismatches.push_back({{"index", i}, {"recomputed", now}});
    }
    bool same = mismatches.empty();
    std::cout << json{{"status", same ? "Reproduced" : "Diverged"}, {"failures", failures.size()}, {"mismatches", mismatches}}
                     .dump(2)
              << "\n";
    return kAssertion;
}

int expsum_verify(const std::string& case_name_, const std::string& params_path, int64_t N) {
    json p = read_json(params_path);
    check_keys(p, {"a", "beta", "u", "k", "l", "p", "q", "r", "s", "t"}, "params");
    CaseKind kind;
    try {
        kind = case_from_name(case_name_);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    auto sc = [&](const char* k, TaggedReal def) { return p.contains(k) ? scalar_from_json(p.at(k)) : def; };
    TaggedReal beta = sc("beta", TaggedReal::sqrt_of(2)), u = sc("u", TaggedReal(0)), s = sc("s", TaggedReal(0));
    ExpSumCase c;
    try {
        if (kind == CaseKind::Linear) c = ExpSumCase::linear(beta);
        else if (kind == CaseKind::Generic) c = ExpSumCase::generic(expr_from_json(p.at("a")), beta, u);
        else
            c = ExpSumCase::special(kind, p.value("k", int64_t(0)), p.value("l", int64_t(0)),
                                    expr_from_json(p.value("p", json("x"))), beta, u);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("case: ") + e.what());
    }
    Rat q, r;
    TaggedReal t;
    if (p.contains("t")) {
        t = scalar_from_json(p.at("t"));
        auto qr = q_dependence(beta, t, s);
        if (!qr) throw ConfigError("t - beta s is not in Q + beta Q; the closed forms need that dependence");
        q = qr->first;
        r = qr->second;
    } else {
        q = sc("q", TaggedReal(0)).a();
        r = sc("r", TaggedReal(0)).a();
        t = TaggedReal(q) + beta * (TaggedReal(r) + s);
    }
    ClosedValue cv;
    try {
        cv = closed_A(c, q, r, t, s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    BruteEngine eng(c.a, c.beta, c.u, N);
    auto b = eng.A(t, s, N);
    json out = {{"case", case_name(kind)},
                {"N", N},
                {"closed", complex_to_json(cv.value)},
                {"brute", complex_to_json(b.value)},
                {"abs_err", std::abs(cv.value - b.value)},
                {"conditions_fired", cv.fired},
                {"exact_zero", cv.exact_zero},
                {"formula", cv.formula},
                {"skipped", b.skipped}};
    std::cout << out.dump(2) << "\n";
    return kOk;
}

int seminorm_compute(const std::string& sys_path, const std::string& f_path, const std::string& groups_path, bool plus) {
    json params = {{"system", read_json(sys_path)}, {"f", read_json(f_path)}, {"groups", read_json(groups_path)}, {"plus", plus}};
    auto res = run_recipe("seminorm-compute", params, RunContext{});
    json v = res.instances.at(0);
    v.erase("index");
    v.erase("pass");
    v.erase("plus");
    std::cout << v.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hardy sequence ergodic averages, exponential sums and box seminorms"};
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "experiment config (JSON)")->envname("HARDY_ERGO_CONFIG");
    app.add_option("--out", o.out, "output directory for JSON / CSV reports")->envname("HARDY_ERGO_OUT");
    app.add_option("--threads", o.threads, "worker threads for range-parallel kernels")->envname("HARDY_ERGO_THREADS");
    app.add_option("--precision", o.precision, "floor evaluation: dd (no escalation) or mp200")
        ->envname("HARDY_ERGO_PRECISION")
        ->check(CLI::IsMember({"dd", "mp200"}));
    auto* seed_opt = app.add_option("--seed", o.seed, "seed for random instances")->envname("HARDY_ERGO_SEED");

    auto* rep = app.add_subcommand("replay", "recompute the failures recorded in an artifact");
    std::string artifact;
    rep->add_option("artifact", artifact)->required();

    auto* es = app.add_subcommand("expsum", "exponential sums");
    auto* ev = es->add_subcommand("verify", "closed form against brute force for one tuple");
    std::string case_name_, params_path;
    int64_t N = 1000000;
    ev->add_option("--case", case_name_)->required();
    ev->add_option("--params", params_path)->required();
    ev->add_option("--N", N);

    auto* sn = app.add_subcommand("seminorm", "box seminorms");
    auto* sc = sn->add_subcommand("compute", "one seminorm value");
    std::string sys_path, f_path, groups_path;
    bool plus = false;
    sc->add_option("--system", sys_path)->required();
    sc->add_option("--f", f_path)->required();
    sc->add_option("--groups", groups_path)->required();
    sc->add_flag("--plus", plus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    o.seed_set = seed_opt->count() > 0;

    try {
        if (o.threads > 0) set_default_threads(o.threads);
        if (!o.precision.empty()) apply_precision(o.precision);
        if (rep->parsed()) return replay(artifact);
        if (ev->parsed()) return expsum_verify(case_name_, params_path, N);
        if (sc->parsed()) return seminorm_compute(sys_path, f_path, groups_path, plus);
        if (es->parsed() || sn->parsed()) throw ConfigError("missing subcommand");
        json cfg = effective_config(o);
        return emit(cfg, execute(cfg, nullptr), o.out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const FrequencyOverflow& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource error: out of memory\n";
        return kResource;
    } catch (const UnsupportedPath& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        // undecidable comparisons and precision budgets exhausted at 200 bits
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    }
}
