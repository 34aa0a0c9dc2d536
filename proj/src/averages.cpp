#include "hergo/averages.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "hergo/cyclo.hpp"
#include "hergo/reduce.hpp"

namespace hergo {

FloorTable tabulate(const HardyExpr& a, int64_t N) {
    SequenceEvaluator ev(a);
    FloorTable t;
    t.floors.resize(N);
    t.ok.resize(N);
    for (int64_t n = 1; n <= N; ++n) {
        auto f = ev.floor_at(n, &t.stats);
        t.ok[n - 1] = f.has_value();
        t.floors[n - 1] = f.value_or(0);
    }
    t.identity = true;
    for (int64_t n = 1; n <= N && t.identity; ++n) t.identity = t.ok[n - 1] && t.floors[n - 1] == n;
    return t;
}

AverageEngine::AverageEngine(System sys, std::vector<HardyExpr> seqs, std::vector<AverageFactor> factors)
    : sys_(std::move(sys)), seqs_(std::move(seqs)), factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("average needs at least one factor");
    for (auto& fac : factors_) {
        if (!(*fac.f.space() == *sys_.space())) throw SpaceMismatch("factor does not live on the system's space");
        for (auto& t : fac.terms) {
            if (t.transformation < 0 || t.transformation >= sys_.ell())
                throw std::invalid_argument("transformation index out of range");
            if (t.sequence < 0 || t.sequence >= static_cast<int>(seqs_.size()))
                throw std::invalid_argument("sequence index out of range");
        }
    }
}

void AverageEngine::ensure(int64_t N) {
    if (N <= tabulated_) return;
    tables_.clear();
    for (auto& a : seqs_) tables_.push_back(tabulate(a, N));
    tabulated_ = N;
}

std::vector<int64_t> AverageEngine::exponent(const AverageFactor& fac, int64_t n) const {
    std::vector<int64_t> v(sys_.ell(), 0);
    for (auto& t : fac.terms) v[t.transformation] += t.sign * tables_[t.sequence].at(n);
    return v;
}

namespace {

// all n in [N] whose floors are certified
std::vector<uint8_t> usable(const std::vector<FloorTable>& tabs, int64_t N, int64_t* used) {
    std::vector<uint8_t> ok(N, 1);
    for (auto& t : tabs)
        for (int64_t i = 0; i < N; ++i) ok[i] &= t.ok[i];
    *used = 0;
    for (auto b : ok) *used += b;
    return ok;
}

// odometer over the terms of each factor
template <class F>
void for_each_combo(const std::vector<size_t>& sizes, F&& body) {
    std::vector<size_t> idx(sizes.size(), 0);
    for (auto s : sizes)
        if (s == 0) return;
    for (;;) {
        body(idx);
        size_t r = 0;
        while (r < idx.size() && ++idx[r] == sizes[r]) idx[r++] = 0;
        if (r == idx.size()) return;
    }
}

}  // namespace

AverageResult AverageEngine::rotation_average(int64_t N) {
    AverageResult res;
    auto ok = usable(tables_, N, &res.used);
    res.skipped = N - res.used;
    const size_t R = factors_.size(), J = seqs_.size();
    std::vector<std::vector<std::pair<FreqKey, cplx>>> terms(R);
    std::vector<size_t> sizes(R);
    for (size_t r = 0; r < R; ++r) {
        terms[r].assign(factors_[r].f.coeffs().begin(), factors_[r].f.coeffs().end());
        sizes[r] = terms[r].size();
    }
    bool all_identity = res.used == N;
    for (auto& t : tables_) all_identity = all_identity && t.identity && t.floors.size() >= static_cast<size_t>(N);
    // merge combinations sharing the phase vector
    std::map<std::pair<FreqKey, std::vector<std::string>>, std::pair<std::vector<TaggedReal>, cplx>> groups;
    for_each_combo(sizes, [&](const std::vector<size_t>& idx) {
        FreqKey K(sys_.space()->dim, 0);
        cplx c = 1.0;
        std::vector<TaggedReal> theta(J, TaggedReal(0));
        for (size_t r = 0; r < R; ++r) {
            auto& [k, cr] = terms[r][idx[r]];
            for (size_t i = 0; i < K.size(); ++i) K[i] += k[i];
            c *= cr;
            for (auto& t : factors_[r].terms) {
                TaggedReal ph = rotation_phase(sys_, t.transformation, k);
                theta[t.sequence] = t.sign > 0 ? theta[t.sequence] + ph : theta[t.sequence] - ph;
            }
        }
        std::vector<std::string> tag;
        for (auto& th : theta) tag.push_back(th.str());
        auto& g = groups[{K, tag}];
        g.first = theta;
        g.second += c;
    });

    FreqMap out;
    for (auto& [key, g] : groups) {
        auto& theta = g.first;
        // rational parts exactly with a common denominator, the rest in double-double
        int64_t D = 1;
        bool exact_ok = true;
        std::vector<Rat> rat(J);
        std::vector<DD> irr(J, DD(0.0));
        std::vector<uint8_t> has_irr(J, 0);
        for (size_t j = 0; j < J; ++j) {
            const TaggedReal& t = theta[j];
            if (t.kind() == TaggedReal::Kind::Flagged) {
                irr[j] = t.to_dd();
                has_irr[j] = 1;
                continue;
            }
            rat[j] = rat_frac(t.a());
            if (t.kind() == TaggedReal::Kind::Quad) {
                irr[j] = (TaggedReal::quad(0, t.b(), t.d())).to_dd();
                has_irr[j] = 1;
            }
            BigInt den = denominator(rat[j]);
            if (den > (int64_t(1) << 30) || lcm64(D, static_cast<int64_t>(den)) > (int64_t(1) << 30)) exact_ok = false;
            else D = lcm64(D, static_cast<int64_t>(den));
        }
        std::vector<int64_t> num(J, 0);
        if (exact_ok)
            for (size_t j = 0; j < J; ++j) num[j] = static_cast<int64_t>(numerator(Rat(rat[j] * D)));
        auto term = [&](int64_t i) -> cplx {
            if (!ok[i]) return 0.0;
            __int128 acc = 0;
            DD ph(0.0);
            for (size_t j = 0; j < J; ++j) {
                int64_t fl = tables_[j].floors[i];
                if (exact_ok) acc = (acc + static_cast<__int128>(mod64(fl, D)) * num[j]) % D;
                else ph = ph + frac(rat_to_dd(rat[j]) * DD::from_int(fl));
                if (has_irr[j]) ph = ph + frac(DD::from_int(fl) * irr[j]);
            }
            if (exact_ok && acc != 0) ph = ph + DD(static_cast<double>(static_cast<int64_t>(acc))) / DD(static_cast<double>(D));
            return expi(frac(ph));
        };
        bool all_rational = exact_ok && std::none_of(has_irr.begin(), has_irr.end(), [](uint8_t b) { return b; });
        cplx S = 0;
        if (all_identity) {
            // sum_{n<=N} e(n Theta), Theta = sum_j theta_j
            TaggedReal Th(0);
            for (auto& t : theta) Th = Th + t;
            if (Th.kind() != TaggedReal::Kind::Flagged && Th.is_integer()) {
                S = static_cast<double>(N);
            } else {
                DD th = frac(Th.to_dd());
                cplx z = expi(th), zN = expi(frac(th * DD::from_int(N)));
                // near-resonant flagged phases are summed termwise
                S = std::abs(z - 1.0) > 1e-9 ? z * (zN - 1.0) / (z - 1.0) : deterministic_sum<cplx>(0, N, term);
            }
        } else if (all_rational) {
            // residue counts, then one exact root of unity per residue
            std::vector<int64_t> cnt(D, 0);
            for (int64_t i = 0; i < N; ++i) {
                if (!ok[i]) continue;
                __int128 acc = 0;
                for (size_t j = 0; j < J; ++j)
                    acc = (acc + static_cast<__int128>(mod64(tables_[j].floors[i], D)) * num[j]) % D;
                ++cnt[static_cast<int64_t>(acc)];
            }
            for (int64_t q = 0; q < D; ++q)
                if (cnt[q]) S += static_cast<double>(cnt[q]) * expi_rat(Rat(q, D));
        } else {
            S = deterministic_sum<cplx>(0, N, term);
        }
        cplx v = res.used ? g.second * S / static_cast<double>(res.used) : cplx(0);
        out[key.first] += v;
    }
    res.value = Observable::from_map(sys_.space(), std::move(out));
    return res;
}

AverageResult AverageEngine::finite_average(int64_t N) {
    AverageResult res;
    auto ok = usable(tables_, N, &res.used);
    res.skipped = N - res.used;
    const Space& sp = *sys_.space();
    const size_t R = factors_.size();
    std::map<std::vector<int64_t>, int64_t> hist;
    std::vector<int64_t> y(R);
    for (int64_t n = 1; n <= N; ++n) {
        if (!ok[n - 1]) continue;
        for (size_t r = 0; r < R; ++r) {
            auto v = exponent(factors_[r], n);
            std::vector<int64_t> s(sp.moduli.size(), 0);
            for (int m = 0; m < sys_.ell(); ++m)
                for (size_t i = 0; i < s.size(); ++i)
                    s[i] = mod64(s[i] + mod64(v[m], sp.moduli[i]) * sys_.shift(m)[i], sp.moduli[i]);
            y[r] = sp.index(s);
        }
        ++hist[y];
    }
    int64_t states = sp.states();
    std::vector<cplx> table(states, 0.0);
    for (auto& [ys, cnt] : hist) {
        double w = static_cast<double>(cnt) / static_cast<double>(res.used);
        std::vector<std::vector<int64_t>> shift(R);
        for (size_t r = 0; r < R; ++r) shift[r] = sp.coords(ys[r]);
        for (int64_t idx = 0; idx < states; ++idx) {
            auto x = sp.coords(idx);
            cplx p = w;
            for (size_t r = 0; r < R; ++r) {
                auto z = x;
                for (size_t i = 0; i < z.size(); ++i) z[i] += shift[r][i];
                p *= factors_[r].f.values()[sp.index(z)];
            }
            table[idx] += p;
        }
    }
    res.value = Observable::table(sys_.space(), std::move(table));
    return res;
}

AverageResult AverageEngine::automorphism_average(int64_t N) {
    AverageResult res;
    auto ok = usable(tables_, N, &res.used);
    res.skipped = N - res.used;
    const Space& sp = *sys_.space();
    const size_t R = factors_.size(), B = sp.blocks.size();
    std::vector<std::vector<std::pair<FreqKey, cplx>>> terms(R);
    std::vector<size_t> sizes(R);
    for (size_t r = 0; r < R; ++r) {
        terms[r].assign(factors_[r].f.coeffs().begin(), factors_[r].f.coeffs().end());
        sizes[r] = terms[r].size();
    }
    std::vector<std::vector<size_t>> combos;
    std::vector<cplx> ccoef;
    for_each_combo(sizes, [&](const std::vector<size_t>& idx) {
        cplx c = 1.0;
        for (size_t r = 0; r < R; ++r) c *= terms[r][idx[r]].second;
        combos.push_back(idx);
        ccoef.push_back(c);
    });

    // canonical form of sum_r A^{o_r} v_r keyed by (block, v_r, o_r)
    std::map<std::vector<int64_t>, std::array<int64_t, 3>> cache;
    FreqMap out;
    const double inv = res.used ? 1.0 / static_cast<double>(res.used) : 0.0;
    std::vector<std::vector<int64_t>> delta(R, std::vector<int64_t>(B));
    for (int64_t n = 1; n <= N; ++n) {
        if (!ok[n - 1]) continue;
        for (size_t r = 0; r < R; ++r) {
            auto v = exponent(factors_[r], n);
            for (size_t b = 0; b < B; ++b) {
                int64_t d = 0;
                for (int m = 0; m < sys_.ell(); ++m) d += v[m] * sys_.powers(m)[b];
                delta[r][b] = d;
            }
        }
        for (size_t ci = 0; ci < combos.size(); ++ci) {
            FreqKey key(3 * B, 0);
            for (size_t b = 0; b < B; ++b) {
                std::vector<std::array<int64_t, 3>> parts;
                for (size_t r = 0; r < R; ++r) {
                    const FreqKey& k = terms[r][combos[ci][r]].first;
                    if (k[3 * b] == 0 && k[3 * b + 1] == 0) continue;
                    parts.push_back({k[3 * b], k[3 * b + 1], k[3 * b + 2] + delta[r][b]});
                }
                if (parts.empty()) continue;
                if (parts.size() == 1) {
                    key[3 * b] = parts[0][0], key[3 * b + 1] = parts[0][1], key[3 * b + 2] = parts[0][2];
                    continue;
                }
                int64_t emin = parts[0][2];
                for (auto& p : parts) emin = std::min(emin, p[2]);
                std::vector<int64_t> ck{static_cast<int64_t>(b)};
                for (auto& p : parts) ck.insert(ck.end(), {p[0], p[1], p[2] - emin});
                auto it = cache.find(ck);
                if (it == cache.end()) {
                    BigInt s1 = 0, s2 = 0;
                    for (auto& p : parts) {
                        auto w = sp.blocks[b].apply(p[2] - emin, p[0], p[1]);
                        s1 += w[0], s2 += w[1];
                    }
                    auto [v0, m] = sp.blocks[b].canonical(s1, s2);
                    it = cache.emplace(ck, std::array<int64_t, 3>{v0[0], v0[1], m}).first;
                }
                auto& cv = it->second;
                if (cv[0] == 0 && cv[1] == 0) continue;
                key[3 * b] = cv[0], key[3 * b + 1] = cv[1], key[3 * b + 2] = emin + cv[2];
            }
            out[key] += ccoef[ci];
        }
    }
    for (auto& kv : out) kv.second *= inv;
    res.value = Observable::from_map(sys_.space(), std::move(out));
    return res;
}

AverageResult AverageEngine::average(int64_t N) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    ensure(N);
    switch (sys_.kind()) {
        case System::Kind::TorusRotation: return rotation_average(N);
        case System::Kind::FiniteAbelian: return finite_average(N);
        case System::Kind::ToralAutomorphism: return automorphism_average(N);
    }
    return {};
}

namespace {

constexpr int kDyadicBits = 40;
constexpr uint64_t kMask = (uint64_t(1) << kDyadicBits) - 1;

struct M2 {
    uint64_t a, b, c, d;
};

M2 mul_mod(const M2& x, const M2& y) {
    auto mm = [](uint64_t p, uint64_t q, uint64_t r, uint64_t s) {
        unsigned __int128 v = static_cast<unsigned __int128>(p) * q + static_cast<unsigned __int128>(r) * s;
        return static_cast<uint64_t>(v) & kMask;
    };
    return {mm(x.a, y.a, x.b, y.c), mm(x.a, y.b, x.b, y.d), mm(x.c, y.a, x.d, y.c), mm(x.c, y.b, x.d, y.d)};
}

uint64_t to_mod(int64_t v) { return static_cast<uint64_t>(v) & kMask; }

M2 pow_mod(const Mat2& U, int64_t e) {
    Mat2 base = U;
    if (e < 0) {
        int64_t det = U.det();
        base = {det * U.d, -det * U.b, -det * U.c, det * U.a};
        e = -e;
    }
    M2 r{1, 0, 0, 1}, x{to_mod(base.a), to_mod(base.b), to_mod(base.c), to_mod(base.d)};
    while (e) {
        if (e & 1) r = mul_mod(r, x);
        x = mul_mod(x, x);
        e >>= 1;
    }
    return r;
}

}  // namespace

AverageEngine::Residual AverageEngine::monte_carlo_residual(int64_t N, cplx target, int64_t samples, uint64_t seed) {
    if (sys_.kind() != System::Kind::ToralAutomorphism)
        throw std::invalid_argument("Monte Carlo residual is only used on automorphism systems");
    ensure(N);
    int64_t used = 0;
    auto ok = usable(tables_, N, &used);
    const Space& sp = *sys_.space();
    const size_t R = factors_.size(), B = sp.blocks.size();
    // frequencies of each factor as vectors mod 2^40, and the bound sum |c|
    struct Term {
        std::vector<uint64_t> k;  // 2B entries
        std::vector<std::pair<int64_t, std::array<int64_t, 2>>> orbit;  // (e, v0) per block
        cplx c;
    };
    std::vector<std::vector<Term>> fterms(R);
    double bound = std::abs(target);
    double prod_bound = 1;
    for (size_t r = 0; r < R; ++r) {
        for (auto& [k, c] : factors_[r].f.coeffs()) {
            Term t;
            t.c = c;
            for (size_t b = 0; b < B; ++b) t.orbit.push_back({k[3 * b + 2], {k[3 * b], k[3 * b + 1]}});
            fterms[r].push_back(std::move(t));
        }
        prod_bound *= factors_[r].f.sup_bound();
    }
    bound += prod_bound;
    // per (n, r, term): frequency (A^{e + delta} v0) mod 2^40 = (U^T)^{e+delta} v0
    std::vector<int64_t> ns;
    for (int64_t n = 1; n <= N; ++n)
        if (ok[n - 1]) ns.push_back(n);
    std::vector<std::vector<std::vector<uint64_t>>> freq(ns.size());
    for (size_t ni = 0; ni < ns.size(); ++ni) {
        freq[ni].resize(R);
        for (size_t r = 0; r < R; ++r) {
            auto v = exponent(factors_[r], ns[ni]);
            for (auto& t : fterms[r]) {
                for (size_t b = 0; b < B; ++b) {
                    int64_t d = 0;
                    for (int m = 0; m < sys_.ell(); ++m) d += v[m] * sys_.powers(m)[b];
                    auto [e, v0] = t.orbit[b];
                    M2 P = pow_mod(sp.blocks[b].generator().transpose(), e + d);
                    uint64_t x0 = to_mod(v0[0]), x1 = to_mod(v0[1]);
                    unsigned __int128 f0 = static_cast<unsigned __int128>(P.a) * x0 + static_cast<unsigned __int128>(P.b) * x1;
                    unsigned __int128 f1 = static_cast<unsigned __int128>(P.c) * x0 + static_cast<unsigned __int128>(P.d) * x1;
                    freq[ni][r].push_back(static_cast<uint64_t>(f0) & kMask);
                    freq[ni][r].push_back(static_cast<uint64_t>(f1) & kMask);
                }
            }
        }
    }
    std::mt19937_64 rng(seed);
    double acc = 0;
    std::vector<uint64_t> x(2 * B);
    for (int64_t s = 0; s < samples; ++s) {
        for (auto& xi : x) xi = rng() & kMask;
        cplx F = 0;
        for (size_t ni = 0; ni < ns.size(); ++ni) {
            cplx p = 1;
            for (size_t r = 0; r < R; ++r) {
                cplx fr = 0;
                const auto& fq = freq[ni][r];
                for (size_t t = 0; t < fterms[r].size(); ++t) {
                    unsigned __int128 ph = 0;
                    for (size_t i = 0; i < 2 * B; ++i) ph += static_cast<unsigned __int128>(fq[t * 2 * B + i]) * x[i];
                    uint64_t pm = static_cast<uint64_t>(ph) & kMask;
                    fr += fterms[r][t].c * expi_rat(Rat(static_cast<int64_t>(pm), int64_t(1) << kDyadicBits));
                }
                p *= fr;
            }
            F += p;
        }
        F = (used ? F / static_cast<double>(used) : cplx(0)) - target;
        acc += std::norm(F);
    }
    double sq = acc / static_cast<double>(samples);
    double err = 3.0 * bound * bound / std::sqrt(static_cast<double>(samples));
    Residual out;
    out.value = std::sqrt(sq);
    out.monte_carlo = true;
    out.mc_error = std::sqrt(sq + err) - std::sqrt(std::max(0.0, sq - err));
    out.skip_fraction = static_cast<double>(N - used) / static_cast<double>(N);
    return out;
}

AverageEngine::Residual AverageEngine::residual(int64_t N, cplx target, int64_t mc_samples, uint64_t seed) {
    try {
        auto r = average(N);
        Residual out;
        out.value = l2_distance(r.value, Observable::constant(sys_.space(), target));
        out.skip_fraction = static_cast<double>(r.skipped) / static_cast<double>(N);
        return out;
    } catch (const FrequencyOverflow&) {
        if (mc_samples <= 0 || sys_.kind() != System::Kind::ToralAutomorphism) throw;
        return monte_carlo_residual(N, target, mc_samples, seed);
    }
}

Observable multi_average(const System& sys, const std::vector<HardyExpr>& a, const std::vector<Observable>& f,
                         int64_t N) {
    if (a.size() != f.size() || static_cast<int>(a.size()) != sys.ell())
        throw std::invalid_argument("multi_average needs one sequence and one observable per transformation");
    std::vector<AverageFactor> fac;
    for (size_t j = 0; j < f.size(); ++j) fac.push_back({f[j], {{static_cast<int>(j), static_cast<int>(j), 1}}});
    AverageEngine eng(sys, a, fac);
    return eng.average(N).value;
}

AverageReport run_report(AverageEngine& eng, cplx target, const std::string& kind, const ReportOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    AverageReport rep;
    rep.kind = kind;
    for (size_t i = 0; i < opt.N_grid.size(); ++i)
        if (opt.N_grid[i] < 1 || (i && opt.N_grid[i] <= opt.N_grid[i - 1]))
            throw std::invalid_argument("N grid must be positive and strictly increasing");
    rep.N_grid = opt.N_grid;
    for (auto N : opt.N_grid) {
        auto r = eng.residual(N, target, opt.mc_samples, opt.seed);
        rep.residuals.push_back(r.value);
        rep.skip_fractions.push_back(r.skip_fraction);
        rep.monte_carlo.push_back(r.monte_carlo);
        rep.mc_errors.push_back(r.mc_error);
        rep.skip_fraction = std::max(rep.skip_fraction, r.skip_fraction);
    }
    size_t m = rep.residuals.size();
    rep.tail_monotone = m < 2 || rep.residuals[m - 1] <= rep.residuals[m - 2] + 1e-12;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

AverageReport joint_ergodicity_report(const System& sys, const std::vector<HardyExpr>& a,
                                      const std::vector<Observable>& f, const ReportOptions& opt) {
    if (a.size() != f.size() || static_cast<int>(a.size()) != sys.ell())
        throw std::invalid_argument("joint report needs one sequence and one observable per transformation");
    std::vector<AverageFactor> fac;
    cplx target = 1.0;
    for (size_t j = 0; j < f.size(); ++j) {
        fac.push_back({f[j], {{static_cast<int>(j), static_cast<int>(j), 1}}});
        target *= integral(f[j]);
    }
    AverageEngine eng(sys, a, fac);
    return run_report(eng, target, "joint", opt);
}

AverageReport difference_ergodicity_report(const System& sys, const std::vector<HardyExpr>& a, int i, int j,
                                           const Observable& f, const ReportOptions& opt) {
    if (i == j) throw std::invalid_argument("difference report needs i != j");
    AverageEngine eng(sys, a, {{f, {{i, i, 1}, {j, j, -1}}}});
    return run_report(eng, integral(f), "difference", opt);
}

AverageReport product_ergodicity_report(const System& sys, const std::vector<HardyExpr>& a,
                                        const std::vector<Observable>& f, const ReportOptions& opt) {
    if (a.size() != f.size() || static_cast<int>(a.size()) != sys.ell())
        throw std::invalid_argument("product report needs one sequence and one observable per transformation");
    System P = product_system(sys);
    AverageFactor fac{tensor(f), {}};
    for (int m = 0; m < sys.ell(); ++m) fac.terms.push_back({m, m, 1});
    cplx target = 1.0;
    for (auto& g : f) target *= integral(g);
    AverageEngine eng(P, a, {fac});
    return run_report(eng, target, "product", opt);
}

AverageReport single_ergodicity_report(const System& sys, int j, const HardyExpr& a, const Observable& f,
                                       const ReportOptions& opt) {
    AverageEngine eng(sys, {a}, {{f, {{j, 0, 1}}}});
    return run_report(eng, integral(f), "single", opt);
}

std::vector<cplx> weak_residuals(const Observable& average, cplx target) {
    const auto& sp = average.space();
    int64_t d = sp->dim;
    std::vector<std::vector<int64_t>> ks;
    auto e = [&](std::initializer_list<std::pair<int64_t, int64_t>> entries) {
        std::vector<int64_t> k(d, 0);
        for (auto [i, v] : entries) k[i] += v;
        ks.push_back(k);
    };
    e({});
    e({{0, 1}});
    e({{0, -1}});
    e({{0, 2}});
    e({{0, -2}});
    e({{0, 1}, {d - 1, 1}});
    e({{0, 1}, {d - 1, -1}});
    e({{0, 3}});
    Observable diff = average - Observable::constant(sp, target);
    std::vector<cplx> out;
    for (auto& k : ks) out.push_back(inner(diff, Observable::character(sp, k)));
    return out;
}

// ---- schemes ----

Scheme Scheme::cesaro() { return {}; }

Scheme Scheme::logarithmic() {
    return weighted("log", [](int64_t n) { return std::log(static_cast<double>(n)); });
}

Scheme Scheme::weighted(std::string name, std::function<double(int64_t)> W) {
    Scheme s;
    s.kind = Kind::Weighted;
    s.weight_name = std::move(name);
    s.W = std::move(W);
    return s;
}

cplx scheme_average(const std::vector<cplx>& v, const Scheme& scheme, int64_t N) {
    if (N < 1 || N > static_cast<int64_t>(v.size())) throw std::invalid_argument("N outside the sequence");
    if (scheme.kind == Scheme::Kind::Cesaro)
        return deterministic_sum<cplx>(0, N, [&](int64_t i) { return v[i]; }) / static_cast<double>(N);
    double WN = scheme.W(N);
    if (!(WN > 0)) throw SchemeDomain("W(N) must be positive");
    double prev = scheme.W(1);
    std::vector<double> w(N);
    for (int64_t n = 1; n <= N; ++n) {
        double next = scheme.W(n + 1);
        if (next < prev) throw SchemeDomain("weight W must be nondecreasing");
        w[n - 1] = next - prev;
        prev = next;
    }
    return deterministic_sum<cplx>(0, N, [&](int64_t i) { return w[i] * v[i]; }) / WN;
}

cplx interval_average(const std::vector<cplx>& v, int64_t lo, int64_t hi) {
    if (lo < 0 || hi <= lo || hi > static_cast<int64_t>(v.size())) throw std::invalid_argument("bad interval");
    return deterministic_sum<cplx>(lo, hi, [&](int64_t i) { return v[i]; }) / static_cast<double>(hi - lo);
}

std::vector<int64_t> dyadic_points(const std::string& spec, int64_t max_n) {
    std::vector<int64_t> pts;
    Rat c;
    if (spec == "2^N") {
        c = 2;
    } else if (spec.rfind("floor(", 0) == 0 && spec.size() > 9 && spec.substr(spec.size() - 3) == "^N)") {
        c = rat_parse(spec.substr(6, spec.size() - 9));
    } else {
        throw SchemeDomain("unknown dyadic spec '" + spec + "'");
    }
    if (c <= 1) throw SchemeDomain("dyadic ratio must exceed 1");
    Rat p = 1;
    for (int K = 0; K < 200; ++K, p *= c) {
        BigInt f = rat_floor(p);
        if (f > max_n) break;
        int64_t v = static_cast<int64_t>(f);
        if (v >= 1 && (pts.empty() || v > pts.back())) pts.push_back(v);
    }
    return pts;
}

DyadicReport dyadic_check(const std::vector<cplx>& v, cplx limit, const std::vector<int64_t>& points, int tail) {
    DyadicReport rep;
    std::vector<cplx> prefix(v.size() + 1, 0.0);
    for (size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i];
    auto C = [&](int64_t n) { return prefix[n] / static_cast<double>(n); };
    for (size_t K = 0; K + 1 < points.size(); ++K) {
        int64_t lo = points[K], hi = points[K + 1];
        if (hi > static_cast<int64_t>(v.size())) break;
        rep.points.push_back(lo);
        rep.dyadic_err.push_back(std::abs(interval_average(v, lo, hi) - limit));
        rep.cesaro_err.push_back(std::max(std::abs(C(lo) - limit), std::abs(C(hi) - limit)));
    }
    size_t m = rep.points.size();
    for (size_t i = m > static_cast<size_t>(tail) ? m - tail : 0; i < m; ++i) {
        double d = rep.dyadic_err[i], c = rep.cesaro_err[i];
        double ratio = d <= 1e-15 ? 0.0 : (c > 0 ? d / c : INFINITY);
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
    }
    return rep;
}

}  // namespace hergo
