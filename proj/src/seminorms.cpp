#include "hergo/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <set>

#include "hergo/cyclo.hpp"

namespace hergo {

// ---- SubgroupSpec ----

SubgroupSpec SubgroupSpec::of(std::vector<std::vector<TaggedReal>> gens) {
    if (gens.empty()) throw std::invalid_argument("subgroup needs at least one generator");
    SubgroupSpec G;
    G.ell = static_cast<int>(gens[0].size());
    for (auto& g : gens) {
        if (static_cast<int>(g.size()) != G.ell) throw std::invalid_argument("generator dimension mismatch");
        if (std::all_of(g.begin(), g.end(), [](const TaggedReal& t) { return t.is_zero(); }))
            throw std::invalid_argument("generators must be nonzero");
    }
    G.gens = std::move(gens);
    return G;
}

SubgroupSpec SubgroupSpec::integer(const std::vector<std::vector<int64_t>>& gens) {
    std::vector<std::vector<TaggedReal>> g;
    for (auto& v : gens) g.emplace_back(v.begin(), v.end());
    return of(std::move(g));
}

SubgroupSpec SubgroupSpec::standard(int ell) {
    std::vector<std::vector<int64_t>> g(ell, std::vector<int64_t>(ell, 0));
    for (int i = 0; i < ell; ++i) g[i][i] = 1;
    return integer(g);
}

bool SubgroupSpec::rational() const {
    for (auto& g : gens)
        for (auto& t : g)
            if (t.kind() != TaggedReal::Kind::Rational) return false;
    return true;
}

bool SubgroupSpec::integral() const {
    for (auto& g : gens)
        for (auto& t : g)
            if (!t.is_integer()) return false;
    return true;
}

SubgroupSpec SubgroupSpec::scaled(const TaggedReal& c) const {
    SubgroupSpec G = *this;
    for (auto& g : G.gens)
        for (auto& t : g) t = c * t;
    return of(G.gens);
}

SubgroupSpec SubgroupSpec::sum(const SubgroupSpec& o) const {
    if (o.ell != ell) throw std::invalid_argument("subgroups live in different R^l");
    auto g = gens;
    g.insert(g.end(), o.gens.begin(), o.gens.end());
    return of(std::move(g));
}

std::string SubgroupSpec::str() const {
    std::string s = "<";
    for (size_t i = 0; i < gens.size(); ++i) {
        s += i ? ", (" : "(";
        for (size_t j = 0; j < gens[i].size(); ++j) s += (j ? "," : "") + gens[i][j].str();
        s += ")";
    }
    return s + ">";
}

// ---- finite abelian exact path ----

namespace {

void require_finite(const System& sys, const char* what) {
    if (sys.kind() != System::Kind::FiniteAbelian) throw UnsupportedPath(std::string(what) + " needs a finite abelian system");
}

int64_t add_index(const Space& sp, int64_t x, int64_t y) {
    int64_t r = 0, mul = 1;
    for (auto m : sp.moduli) {
        r += ((x % m + y % m) % m) * mul;
        x /= m, y /= m, mul *= m;
    }
    return r;
}

// x + y on the state space by index
struct AddTable {
    int64_t n;
    std::vector<int32_t> t;
    explicit AddTable(const Space& sp) : n(sp.states()), t(n * n) {
        for (int64_t i = 0; i < n; ++i)
            for (int64_t j = 0; j < n; ++j) t[i * n + j] = static_cast<int32_t>(add_index(sp, i, j));
    }
    int64_t add(int64_t x, int64_t y) const { return t[x * n + y]; }
};

std::vector<int64_t> neg_table(const Space& sp) {
    std::vector<int64_t> out(sp.states());
    for (int64_t i = 0; i < sp.states(); ++i) {
        auto c = sp.coords(i);
        for (auto& v : c) v = -v;
        out[i] = sp.index(c);
    }
    return out;
}

// state reached by the shifts sum_j v_j sigma_j
int64_t shift_state(const System& sys, const std::vector<int64_t>& v) {
    const Space& sp = *sys.space();
    std::vector<int64_t> s(sp.moduli.size(), 0);
    for (int j = 0; j < sys.ell(); ++j)
        for (size_t i = 0; i < s.size(); ++i)
            s[i] = mod64(s[i] + mod64(v[j], sp.moduli[i]) * sys.shift(j)[i], sp.moduli[i]);
    return sp.index(s);
}

bool table_constant(const Observable& g, cplx* c) {
    const auto& v = g.values();
    double scale = 1.0 + std::abs(v[0]);
    for (auto& x : v)
        if (std::abs(x - v[0]) > 1e-13 * scale) return false;
    *c = v[0];
    return true;
}

struct FiniteCtx {
    const System& sys;
    AddTable add;
    std::vector<std::vector<std::pair<int64_t, double>>> mu, H;

    FiniteCtx(const System& s, const std::vector<SubgroupSpec>& groups) : sys(s), add(*s.space()) {
        for (auto& G : groups) {
            auto m = shift_distribution(s, G);
            auto h = difference_distribution(s, m);
            mu.emplace_back(m.mass.begin(), m.mass.end());
            H.emplace_back(h.mass.begin(), h.mass.end());
        }
    }

    // g . conj(g(. + d))
    Observable delta(const Observable& g, int64_t d) const {
        const auto& v = g.values();
        std::vector<cplx> out(v.size());
        for (size_t x = 0; x < v.size(); ++x) out[x] = v[x] * std::conj(v[add.add(x, d)]);
        return Observable::table(g.space(), std::move(out));
    }

    // ||g||^{2^{s-i}} along G_{i+1}, ..., G_s
    double classical(const Observable& g, size_t i) const {
        size_t s = H.size();
        cplx c;
        if (table_constant(g, &c)) return std::pow(std::abs(c), std::ldexp(1.0, static_cast<int>(s - i)));
        if (i + 1 == s) {
            // int |E_m T^m g|^2, a sum of nonnegative terms
            const auto& v = g.values();
            double acc = 0;
            for (size_t x = 0; x < v.size(); ++x) {
                cplx a = 0;
                for (auto& [y, w] : mu[i]) a += w * v[add.add(x, y)];
                acc += std::norm(a);
            }
            return acc / static_cast<double>(v.size());
        }
        double acc = 0;
        for (auto& [d, w] : H[i]) acc += w * classical(delta(g, d), i + 1);
        return acc;
    }

    // (||g||+)^{2^{s-i+1}}
    double plus(const Observable& g, size_t i) const {
        size_t s = H.size();
        cplx c;
        if (table_constant(g, &c)) return std::pow(std::abs(c), std::ldexp(1.0, static_cast<int>(s - i + 1)));
        if (i == s) return std::norm(integral(g));
        double acc = 0;
        for (auto& [d, w] : H[i]) acc += w * plus(delta(g, d), i + 1);
        return acc;
    }
};

double root(double v, size_t s) { return std::pow(std::max(0.0, v), 1.0 / std::ldexp(1.0, static_cast<int>(s))); }

bool exactly_constant(const Observable& f, cplx* c) {
    if (f.is_table()) {
        const auto& v = f.values();
        for (auto& x : v)
            if (x != v[0]) return false;
        *c = v[0];
        return true;
    }
    if (f.coeffs().empty()) {
        *c = 0;
        return true;
    }
    if (f.coeffs().size() != 1) return false;
    auto& [k, v] = *f.coeffs().begin();
    if (std::any_of(k.begin(), k.end(), [](int64_t x) { return x != 0; })) return false;
    *c = v;
    return true;
}

// 2^s-power of the classical seminorm on the exact path
double classical_power(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups) {
    if (groups.empty()) return std::abs(integral(f));
    FiniteCtx ctx(sys, groups);
    return ctx.classical(f, 0);
}

}  // namespace

ShiftDistribution shift_distribution(const System& sys, const SubgroupSpec& G) {
    require_finite(sys, "exact seminorms");
    if (G.ell != sys.ell()) throw std::invalid_argument("subgroup must live in R^l with l the number of transformations");
    if (!G.rational()) throw UnsupportedPath("exact path needs rational generators");
    const Space& sp = *sys.space();
    ShiftDistribution out;
    const size_t K = G.gens.size();
    if (G.integral()) {
        // uniform on the subgroup of X generated by the shifts of the generators
        std::vector<int64_t> u;
        for (auto& g : G.gens) {
            std::vector<int64_t> v;
            for (auto& t : g) v.push_back(rat_num64(t.a()));
            u.push_back(shift_state(sys, v));
        }
        std::set<int64_t> seen{0};
        std::deque<int64_t> q(seen.begin(), seen.end());
        while (!q.empty()) {
            int64_t x = q.front();
            q.pop_front();
            for (auto y : u) {
                int64_t z = add_index(sp, x, y);
                if (seen.insert(z).second) q.push_back(z);
            }
        }
        double w = 1.0 / static_cast<double>(seen.size());
        for (auto z : seen) out.mass[z] = w;
        return out;
    }
    // rational: G acts through its image S in W = (Z/P)^l, w = D m mod P, P = D L with L the exponent
    // of X.  On S0 = S n (DZ/P)^l the floor is linear, so the law averages shift(w_r) + phi(S0 / D) over
    // representatives w_r of the classes of S mod D.
    int64_t D = 1, L = 1;
    for (auto& g : G.gens)
        for (auto& t : g) D = lcm64(D, rat_den64(t.a()));
    for (auto m : sp.moduli) L = lcm64(L, m);
    const int64_t P = D * L;
    const int ell = G.ell;
    std::vector<std::vector<int64_t>> num(K, std::vector<int64_t>(ell));
    for (size_t k = 0; k < K; ++k)
        for (int j = 0; j < ell; ++j) num[k][j] = mod64(rat_num64(G.gens[k][j].a() * D), P);
    if (std::pow(static_cast<double>(D), static_cast<double>(K)) > double(1 << 22))
        throw UnsupportedPath("rational subgroup denominators too large for exact averaging");
    std::map<std::vector<int64_t>, int64_t> reps;  // class mod D -> shift state of a representative
    std::vector<int64_t> kernel_gens;               // phi(S0 / D) generators in X
    auto add_gen = [&](const std::vector<int64_t>& w) {
        std::vector<int64_t> u(ell);
        for (int j = 0; j < ell; ++j) u[j] = w[j] / D;
        kernel_gens.push_back(shift_state(sys, u));
    };
    for (size_t k = 0; k < K; ++k) {
        std::vector<int64_t> w(ell);
        for (int j = 0; j < ell; ++j) w[j] = mod64(D * num[k][j], P);
        add_gen(w);
    }
    std::vector<int64_t> n(K, 0);
    for (;;) {
        std::vector<int64_t> w(ell, 0), r(ell);
        for (int j = 0; j < ell; ++j) {
            for (size_t k = 0; k < K; ++k) w[j] = (w[j] + n[k] * num[k][j]) % P;
            r[j] = w[j] % D;
        }
        if (std::all_of(r.begin(), r.end(), [](int64_t x) { return x == 0; })) add_gen(w);
        if (!reps.count(r)) {
            std::vector<int64_t> fl(ell);
            for (int j = 0; j < ell; ++j) fl[j] = w[j] / D;
            reps[r] = shift_state(sys, fl);
        }
        size_t k = 0;
        while (k < K && ++n[k] == D) n[k++] = 0;
        if (k == K) break;
    }
    std::set<int64_t> H0{0};
    std::deque<int64_t> q{0};
    while (!q.empty()) {
        int64_t x = q.front();
        q.pop_front();
        for (auto y : kernel_gens) {
            int64_t z = add_index(sp, x, y);
            if (H0.insert(z).second) q.push_back(z);
        }
    }
    double w = 1.0 / (static_cast<double>(reps.size()) * static_cast<double>(H0.size()));
    for (auto& [r, x] : reps)
        for (auto h : H0) out.mass[add_index(sp, x, h)] += w;
    return out;
}

ShiftDistribution difference_distribution(const System& sys, const ShiftDistribution& mu) {
    const Space& sp = *sys.space();
    auto neg = neg_table(sp);
    ShiftDistribution out;
    std::vector<double> acc(sp.states(), 0.0);
    for (auto& [y, a] : mu.mass)
        for (auto& [yp, b] : mu.mass) acc[add_index(sp, yp, neg[y])] += a * b;
    for (int64_t z = 0; z < sp.states(); ++z)
        if (acc[z] != 0.0) out.mass[z] = acc[z];
    return out;
}

// ---- torus path ----

namespace {

int64_t floor_comb(const std::vector<int64_t>& n, const std::vector<TaggedReal>& g) {
    DD v(0.0);
    for (size_t i = 0; i < n.size(); ++i) v = v + DD::from_int(n[i]) * g[i].to_dd();
    DD f = floor(v);
    DD r = v - f;
    if (r.hi > 1e-20 && r.hi < 1 - 1e-20) return static_cast<int64_t>(f.hi) + static_cast<int64_t>(f.lo);
    TaggedReal t(0);
    for (size_t i = 0; i < n.size(); ++i) t = t + TaggedReal(n[i]) * g[i];
    return static_cast<int64_t>(t.floor_exact());
}

// E_{n in [0,M)^K} e(k . theta(floor(sum n_i g_i)))
cplx ahat(const System& sys, const SubgroupSpec& G, const FreqKey& k, int64_t M) {
    std::vector<DD> phi(sys.ell());
    for (int j = 0; j < sys.ell(); ++j) phi[j] = rotation_phase(sys, j, k).to_dd();
    const size_t K = G.gens.size();
    if (std::pow(static_cast<double>(M), static_cast<double>(K)) > double(1 << 22))
        throw UnsupportedPath("torus truncation too large");
    std::vector<std::vector<TaggedReal>> col(sys.ell(), std::vector<TaggedReal>(K));
    for (int j = 0; j < sys.ell(); ++j)
        for (size_t i = 0; i < K; ++i) col[j][i] = G.gens[i][j];
    std::vector<int64_t> n(K, 0);
    cplx acc = 0;
    int64_t cnt = 0;
    for (;;) {
        DD ph(0.0);
        for (int j = 0; j < sys.ell(); ++j) {
            if (phi[j].hi == 0.0 && phi[j].lo == 0.0) continue;
            ph = ph + frac(DD::from_int(floor_comb(n, col[j])) * phi[j]);
        }
        acc += expi(frac(ph));
        ++cnt;
        size_t i = 0;
        while (i < K && ++n[i] == M) n[i++] = 0;
        if (i == K) break;
    }
    return acc / static_cast<double>(cnt);
}

FreqKey ksub(const FreqKey& a, const FreqKey& b) {
    FreqKey r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

double torus_power(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups, int64_t M) {
    std::vector<std::pair<FreqKey, cplx>> t(f.coeffs().begin(), f.coeffs().end());
    std::vector<std::map<FreqKey, cplx>> cache(groups.size());
    auto A = [&](size_t i, const FreqKey& k) {
        auto it = cache[i].find(k);
        if (it != cache[i].end()) return it->second;
        return cache[i][k] = ahat(sys, groups[i], k, M);
    };
    if (groups.size() == 1) {
        double v = 0;
        for (auto& [k, c] : t) v += std::norm(c) * std::norm(A(0, k));
        return v;
    }
    // s = 2: k1 - k2 - k3 + k4 = 0
    cplx v = 0;
    for (auto& [k1, c1] : t)
        for (auto& [k2, c2] : t)
            for (auto& [k3, c3] : t) {
                FreqKey k4(k1.size());
                for (size_t i = 0; i < k4.size(); ++i) k4[i] = k2[i] + k3[i] - k1[i];
                auto it = f.coeffs().find(k4);
                if (it == f.coeffs().end()) continue;
                v += c1 * std::conj(c2) * std::conj(c3) * it->second * A(0, ksub(k1, k2)) * A(0, ksub(k4, k3)) *
                     A(1, ksub(k1, k3)) * A(1, ksub(k4, k2));
            }
    return v.real();
}

SeminormValue torus_seminorm(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                             const TorusOptions& opt) {
    if (groups.empty() || groups.size() > 2) throw UnsupportedPath("torus seminorms are computed for s = 1, 2");
    for (auto& G : groups)
        if (G.ell != sys.ell()) throw std::invalid_argument("subgroup dimension mismatch");
    size_t s = groups.size();
    double v1 = root(torus_power(sys, f, groups, opt.M), s);
    double v2 = root(torus_power(sys, f, groups, 2 * opt.M), s);
    double v4 = root(torus_power(sys, f, groups, 4 * opt.M), s);
    SeminormValue out;
    out.value = v4;
    out.exactness = SeminormValue::Exactness::MonteCarlo;
    out.error = std::abs(v4 - v2);
    out.nonconvergence = out.error > opt.tol && out.error > std::abs(v2 - v1);
    return out;
}

}  // namespace

SeminormValue box_seminorm(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                           const TorusOptions& topt) {
    if (!(*f.space() == *sys.space())) throw SpaceMismatch("observable does not live on the system's space");
    SeminormValue out;
    cplx c;
    if (exactly_constant(f, &c) || groups.empty()) {
        out.value = groups.empty() ? std::abs(integral(f)) : std::abs(c);
        return out;
    }
    if (sys.kind() == System::Kind::TorusRotation) return torus_seminorm(sys, f, groups, topt);
    require_finite(sys, "box seminorms");
    out.value = root(classical_power(sys, f, groups), groups.size());
    return out;
}

SeminormValue box_seminorm_plus(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                                const TorusOptions& topt) {
    if (!(*f.space() == *sys.space())) throw SpaceMismatch("observable does not live on the system's space");
    SeminormValue out;
    cplx c;
    if (exactly_constant(f, &c) || groups.empty()) {
        out.value = groups.empty() ? std::abs(integral(f)) : std::abs(c);
        return out;
    }
    if (sys.kind() == System::Kind::TorusRotation) {
        auto sq = diagonal_square(sys);
        auto r = torus_seminorm(sq, tensor({f, f.conj()}), groups, topt);
        r.value = std::sqrt(r.value);
        r.error = std::sqrt(r.error);
        return r;
    }
    require_finite(sys, "box seminorms");
    FiniteCtx ctx(sys, groups);
    out.value = root(ctx.plus(f, 0), groups.size() + 1);
    return out;
}

Observable dual_function(const System& sys, const std::vector<Observable>& f_eps,
                         const std::vector<SubgroupSpec>& groups) {
    if (sys.kind() != System::Kind::FiniteAbelian) throw UnsupportedPath("dual functions are computed on the exact path only");
    size_t s = groups.size();
    if (s == 0 || f_eps.size() != (size_t(1) << s) - 1) throw std::invalid_argument("need 2^s - 1 functions f_eps");
    FiniteCtx ctx(sys, groups);
    int64_t n = sys.space()->states();
    std::vector<cplx> out(n, 0.0);
    std::vector<size_t> idx(s, 0);
    for (size_t i = 0; i < s; ++i)
        if (ctx.H[i].empty()) return Observable::table(sys.space(), out);
    std::vector<int64_t> corner(size_t(1) << s);
    for (;;) {
        double w = 1;
        for (size_t i = 0; i < s; ++i) w *= ctx.H[i][idx[i]].second;
        // shift eps . d for each corner
        int64_t zero = sys.space()->index(std::vector<int64_t>(sys.space()->moduli.size(), 0));
        for (size_t e = 0; e < corner.size(); ++e) {
            int64_t z = zero;
            for (size_t i = 0; i < s; ++i)
                if (e >> i & 1) z = ctx.add.add(z, ctx.H[i][idx[i]].first);
            corner[e] = z;
        }
        for (int64_t x = 0; x < n; ++x) {
            cplx p = w;
            for (size_t e = 1; e < corner.size(); ++e) p *= f_eps[e - 1].values()[ctx.add.add(x, corner[e])];
            out[x] += p;
        }
        size_t i = 0;
        while (i < s && ++idx[i] == ctx.H[i].size()) idx[i++] = 0;
        if (i == s) break;
    }
    return Observable::table(sys.space(), std::move(out));
}

GcsResult gcs_check(const System& sys, const Observable& f, const std::vector<Observable>& f_eps,
                    const std::vector<SubgroupSpec>& groups) {
    GcsResult r;
    auto D = dual_function(sys, f_eps, groups);
    r.lhs = std::abs(integral(f * D));
    r.rhs = std::pow(box_seminorm_plus(sys, f, groups).value, 1.0 / std::ldexp(1.0, static_cast<int>(groups.size())));
    r.sharp = box_seminorm(sys, f, groups).value;
    for (auto& g : f_eps) r.sharp *= box_seminorm(sys, g, groups).value;
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

PropertyReport property_suite(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups,
                              const SubgroupSpec& extra, double tol) {
    require_finite(sys, "the property suite");
    PropertyReport rep;
    double base = box_seminorm(sys, f, groups).value;
    double base_p = box_seminorm_plus(sys, f, groups).value;

    std::vector<size_t> perm(groups.size());
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end())) {
        std::vector<SubgroupSpec> g;
        for (auto i : perm) g.push_back(groups[i]);
        rep.symmetry_gap = std::max(rep.symmetry_gap, std::abs(box_seminorm(sys, f, g).value - base));
        rep.symmetry_gap = std::max(rep.symmetry_gap, std::abs(box_seminorm_plus(sys, f, g).value - base_p));
    }
    if (rep.symmetry_gap > tol) rep.violations.push_back("symmetry gap " + std::to_string(rep.symmetry_gap));

    auto more = groups;
    more.push_back(extra);
    rep.chain = {base, base_p, box_seminorm(sys, f, more).value, box_seminorm_plus(sys, f, more).value};
    for (size_t i = 0; i + 1 < rep.chain.size(); ++i)
        rep.chain_violation = std::max(rep.chain_violation, rep.chain[i] - rep.chain[i + 1]);
    if (rep.chain_violation > tol) rep.violations.push_back("monotonicity chain " + std::to_string(rep.chain_violation));

    // G' = 2G is a subgroup of G
    std::vector<SubgroupSpec> sub;
    for (auto& G : groups) sub.push_back(G.scaled(TaggedReal(2)));
    double sub_c = box_seminorm(sys, f, sub).value, sub_p = box_seminorm_plus(sys, f, sub).value;
    rep.subgroup_violation = std::max(base - sub_c, base_p - sub_p);
    if (rep.subgroup_violation > tol) rep.violations.push_back("subgroup property " + std::to_string(rep.subgroup_violation));

    // part (v): equal single-group averages, i.e. equal shift laws
    rep.part_v_applicable = true;
    for (size_t i = 0; i < groups.size(); ++i) {
        auto a = shift_distribution(sys, groups[i]).mass, b = shift_distribution(sys, sub[i]).mass;
        bool same = a.size() == b.size();
        for (auto it = a.begin(), jt = b.begin(); same && it != a.end(); ++it, ++jt)
            same = it->first == jt->first && std::abs(it->second - jt->second) <= 1e-15;
        rep.part_v_applicable = rep.part_v_applicable && same;
    }
    if (rep.part_v_applicable) {
        rep.part_v_gap = std::max(std::abs(sub_c - base), std::abs(sub_p - base_p));
        if (rep.part_v_gap > tol) rep.violations.push_back("equality of averages " + std::to_string(rep.part_v_gap));
    }

    std::vector<SubgroupSpec> half;
    for (auto& G : groups) half.push_back(G.scaled(TaggedReal(Rat(1, 2))));
    double hp = box_seminorm_plus(sys, f, half).value;
    rep.rescaling_ratio = base_p > 0 ? hp / base_p : 1.0;
    return rep;
}

namespace {

// chi_k(x) = e(sum k_i x_i / M_i) as a dense |X| x |X| phase index table
struct CharTable {
    int64_t n;
    std::vector<cplx> chi;  // chi[k * n + x]
    explicit CharTable(const Space& sp) : n(sp.states()), chi(n * n) {
        int64_t L = 1;
        for (auto m : sp.moduli) L = lcm64(L, m);
        std::vector<cplx> roots(L);
        for (int64_t j = 0; j < L; ++j) roots[j] = expi_rat(Rat(j, L));
        std::vector<std::vector<int64_t>> c(n);
        for (int64_t i = 0; i < n; ++i) c[i] = sp.coords(i);
        for (int64_t k = 0; k < n; ++k)
            for (int64_t x = 0; x < n; ++x) {
                int64_t ph = 0;
                for (size_t i = 0; i < sp.moduli.size(); ++i)
                    ph = (ph + mod64(c[k][i] * c[x][i], sp.moduli[i]) * (L / sp.moduli[i])) % L;
                chi[k * n + x] = roots[ph];
            }
    }
};

}  // namespace

std::vector<cplx> character_coefficients(const Observable& f) {
    if (!f.is_table()) throw UnsupportedPath("character coefficients need a finite space");
    CharTable T(*f.space());
    std::vector<cplx> out(T.n);
    for (int64_t k = 0; k < T.n; ++k) {
        cplx acc = 0;
        for (int64_t x = 0; x < T.n; ++x) acc += f.values()[x] * std::conj(T.chi[k * T.n + x]);
        out[k] = acc / static_cast<double>(T.n);
    }
    return out;
}

Observable from_character_coefficients(const SpaceCPtr& sp, const std::vector<cplx>& coef) {
    CharTable T(*sp);
    std::vector<cplx> v(T.n, 0.0);
    for (int64_t k = 0; k < T.n; ++k)
        if (coef[k] != 0.0)
            for (int64_t x = 0; x < T.n; ++x) v[x] += coef[k] * T.chi[k * T.n + x];
    return Observable::table(sp, std::move(v));
}

namespace {

constexpr double kNullPower = 1e-20;

// 2^s-power of the classical seminorm of chi_k: |E_{m in G_1} chi_k(floor m)|^2 for s = 1, and 1 for
// s >= 2 since Delta_d chi_k is the constant conj(chi_k(d))
struct CharacterSeminorms {
    const System& sys;
    size_t s;
    std::vector<std::vector<int64_t>> coords;
    std::vector<std::pair<std::vector<int64_t>, double>> mu;

    CharacterSeminorms(const System& sy, const std::vector<SubgroupSpec>& groups) : sys(sy), s(groups.size()) {
        if (s == 1)
            for (auto& [y, w] : shift_distribution(sy, groups[0]).mass) mu.push_back({sy.space()->coords(y), w});
    }

    double power(int64_t k) const {
        if (s != 1) return s == 0 ? (k == 0 ? 1.0 : 0.0) : 1.0;
        const Space& sp = *sys.space();
        auto kc = sp.coords(k);
        cplx acc = 0;
        for (auto& [yc, w] : mu) {
            Rat ph = 0;
            for (size_t i = 0; i < kc.size(); ++i) ph += Rat(mod64(kc[i] * yc[i], sp.moduli[i]), sp.moduli[i]);
            acc += w * expi_rat(ph);
        }
        return std::norm(acc);
    }
    bool null(int64_t k) const { return power(k) <= kNullPower; }
};

}  // namespace

Observable factor_project(const System& sys, const Observable& f, const std::vector<SubgroupSpec>& groups) {
    require_finite(sys, "factor projection");
    auto c = character_coefficients(f);
    CharacterSeminorms cs(sys, groups);
    for (int64_t k = 0; k < static_cast<int64_t>(c.size()); ++k)
        if (c[k] != 0.0 && cs.null(k)) c[k] = 0.0;
    return from_character_coefficients(sys.space(), c);
}

std::pair<Observable, Observable> concat_decompose(const System& sys, const Observable& f,
                                                   const std::vector<SubgroupSpec>& G_list, const SubgroupSpec& H,
                                                   const SubgroupSpec& Hp) {
    require_finite(sys, "concatenation");
    auto big = G_list;
    big.push_back(H.sum(Hp));
    auto proj = factor_project(sys, f, big);
    if (l2_norm(proj) > 1e-9 * (1.0 + l2_norm(f)))
        throw std::invalid_argument("f has a nonzero component on the concatenated factor");
    auto gH = G_list, gHp = G_list;
    gH.push_back(H);
    gHp.push_back(Hp);
    auto c = character_coefficients(f);
    CharacterSeminorms cs1(sys, gH), cs2(sys, gHp);
    std::vector<cplx> c1(c.size(), 0.0), c2(c.size(), 0.0);
    for (int64_t k = 0; k < static_cast<int64_t>(c.size()); ++k) {
        if (c[k] == 0.0) continue;
        bool n1 = cs1.null(k);
        if (n1 || std::abs(c[k]) <= 1e-12) {
            c1[k] = c[k];
            continue;
        }
        if (cs2.null(k)) {
            c2[k] = c[k];
            continue;
        }
        auto chi = Observable::character(sys.space(), sys.space()->coords(k));
        throw DecompositionFailure("character " + chi.str() + " is null for the concatenated factor but for neither part");
    }
    return {from_character_coefficients(sys.space(), c1), from_character_coefficients(sys.space(), c2)};
}

ComparisonReport seminorm_comparison_check(const System& sys, const HardyExpr& a1, const HardyExpr& a2,
                                           const TaggedReal& beta1, const TaggedReal& beta2,
                                           const std::vector<Observable>& family, int64_t N, double delta,
                                           double eps) {
    if (sys.ell() < 2) throw std::invalid_argument("comparison needs two transformations");
    ComparisonReport rep;
    rep.delta = delta;
    rep.eps = eps;
    HardyExpr d = beta2 * a1 - beta1 * a2;
    rep.precondition_log = d.leading_atom() <= GrowthAtom{0, 1};
    if (!rep.precondition_log) throw std::invalid_argument("beta2 a1 - beta1 a2 must be O(log)");
    int ell = sys.ell();
    std::vector<std::vector<TaggedReal>> e12(2, std::vector<TaggedReal>(ell, TaggedReal(0)));
    e12[0][0] = TaggedReal(1);
    e12[1][1] = TaggedReal(1);
    std::vector<TaggedReal> b(ell, TaggedReal(0));
    b[0] = beta1;
    b[1] = -beta2;
    std::vector<SubgroupSpec> left{SubgroupSpec::standard(ell), SubgroupSpec::of(e12)};
    std::vector<SubgroupSpec> right{SubgroupSpec::of({b})};
    ReportOptions opt;
    opt.N_grid = {N};
    for (auto& f : family) {
        auto r = difference_ergodicity_report(sys, {a1, a2}, 0, 1, f, opt);
        rep.difference_residual = std::max(rep.difference_residual, r.final_residual());
        double lhs = box_seminorm_plus(sys, f, left).value, rhs = box_seminorm(sys, f, right).value;
        rep.pairs.push_back({lhs, rhs});
        if (lhs <= delta && rhs > eps) rep.implication_holds = false;
    }
    return rep;
}

}  // namespace hergo
