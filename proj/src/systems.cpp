#include "hergo/systems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hergo/cyclo.hpp"

namespace hergo {

namespace {

size_t bits_of(const BigInt& v) { return v == 0 ? 0 : static_cast<size_t>(msb(abs(v))) + 1; }

void check_budget(const BigInt& a, const BigInt& b, int budget) {
    if (bits_of(a) > static_cast<size_t>(budget) || bits_of(b) > static_cast<size_t>(budget))
        throw FrequencyOverflow("frequency exceeds " + std::to_string(budget) + "-bit budget");
}

int64_t to_i64(const BigInt& v) {
    if (bits_of(v) > 62) throw FrequencyOverflow("canonical representative does not fit 64 bits");
    return static_cast<int64_t>(v);
}

bool all_zero(const int64_t* p, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (p[i] != 0) return false;
    return true;
}

std::string vec_str(const std::vector<int64_t>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

cplx e_rat(const Rat& x) { return expi_rat(x); }

// e(sum_j v_j theta_j) with exact rational parts
cplx phase_of(const std::vector<int64_t>& v, const std::vector<TaggedReal>& theta) {
    Rat rat = 0;
    DD irr(0.0);
    for (size_t j = 0; j < v.size(); ++j) {
        if (v[j] == 0 || theta[j].is_zero()) continue;
        if (theta[j].kind() == TaggedReal::Kind::Rational) {
            const Rat& t = theta[j].a();
            BigInt num = numerator(t), den = denominator(t);
            BigInt r = (BigInt(v[j]) * num) % den;
            rat += Rat(r, den);
        } else {
            irr += frac(DD::from_int(v[j]) * theta[j].to_dd());
        }
    }
    return expi(rat_to_dd(rat_frac(rat)) + irr);
}

}  // namespace

// ---- HypBlock ----

HypBlock::HypBlock(const Mat2& U) : U_(U) {
    int64_t det = U.det();
    if (det != 1 && det != -1) throw std::invalid_argument("automorphism block must have |det| = 1");
    int64_t t = U.trace();
    if (t * t - 4 * det <= 0 || t == 0)
        throw std::invalid_argument("automorphism block must be hyperbolic");
    A_ = U.transpose();
    Ainv_ = {det * A_.d, -det * A_.b, -det * A_.c, det * A_.a};
    BigInt a = A_.a, c = A_.c, d = A_.d, tt = t, dt = det;
    // sum over both eigenvalues of (c u1 + (lambda - a) u2)^2
    q11_ = 2 * c * c;
    q12_ = 2 * c * (d - a);
    q22_ = tt * tt - 2 * dt - 2 * a * tt + 2 * a * a;
    double disc = std::sqrt(static_cast<double>(t * t - 4 * det));
    log2_lambda_ = std::log2((std::abs(static_cast<double>(t)) + disc) / 2.0);
}

BigInt HypBlock::Q(const BigInt& u1, const BigInt& u2) const { return q11_ * u1 * u1 + q12_ * u1 * u2 + q22_ * u2 * u2; }

std::pair<std::array<int64_t, 2>, int64_t> HypBlock::canonical(const BigInt& u1, const BigInt& u2, int budget) const {
    if (u1 == 0 && u2 == 0) return {{0, 0}, 0};
    check_budget(u1, u2, budget);
    BigInt v1 = u1, v2 = u2;
    int64_t j = 0;  // v = A^j u
    auto fwd = [&](const BigInt& x, const BigInt& y) {
        return std::array<BigInt, 2>{A_.a * x + A_.b * y, A_.c * x + A_.d * y};
    };
    auto bwd = [&](const BigInt& x, const BigInt& y) {
        return std::array<BigInt, 2>{Ainv_.a * x + Ainv_.b * y, Ainv_.c * x + Ainv_.d * y};
    };
    BigInt q = Q(v1, v2);
    for (;;) {
        auto w = fwd(v1, v2);
        BigInt qw = Q(w[0], w[1]);
        if (qw >= q) break;
        v1 = w[0], v2 = w[1], q = qw, ++j;
    }
    for (;;) {
        auto w = bwd(v1, v2);
        BigInt qw = Q(w[0], w[1]);
        if (qw > q) break;
        v1 = w[0], v2 = w[1], q = qw, --j;
    }
    return {{to_i64(v1), to_i64(v2)}, -j};
}

std::array<BigInt, 2> HypBlock::apply(int64_t e, const BigInt& v1, const BigInt& v2, int budget) const {
    if (v1 == 0 && v2 == 0) return {BigInt(0), BigInt(0)};
    double est = static_cast<double>(std::max(bits_of(v1), bits_of(v2))) + std::abs(static_cast<double>(e)) * log2_lambda_;
    if (est > budget + 4.0) throw FrequencyOverflow("frequency exceeds " + std::to_string(budget) + "-bit budget");
    const Mat2& M = e >= 0 ? A_ : Ainv_;
    BigInt x = v1, y = v2;
    for (int64_t i = 0; i < std::abs(e); ++i) {
        BigInt nx = M.a * x + M.b * y;
        y = M.c * x + M.d * y;
        x = nx;
    }
    check_budget(x, y, budget);
    return {x, y};
}

// ---- Space ----

int64_t Space::states() const {
    int64_t n = 1;
    for (auto m : moduli) n *= m;
    return n;
}

std::vector<int64_t> Space::coords(int64_t idx) const {
    std::vector<int64_t> x(moduli.size());
    for (size_t i = 0; i < moduli.size(); ++i) {
        x[i] = idx % moduli[i];
        idx /= moduli[i];
    }
    return x;
}

int64_t Space::index(const std::vector<int64_t>& x) const {
    int64_t idx = 0;
    for (size_t i = moduli.size(); i-- > 0;) idx = idx * moduli[i] + mod64(x[i], moduli[i]);
    return idx;
}

std::string Space::str() const {
    switch (kind) {
        case Kind::Finite: return "Z/" + vec_str(moduli);
        case Kind::Torus: return "T^" + std::to_string(dim);
        case Kind::AutTorus: return "T^" + std::to_string(dim) + " (" + std::to_string(blocks.size()) + " blocks)";
    }
    return "?";
}

bool Space::operator==(const Space& o) const {
    return kind == o.kind && moduli == o.moduli && dim == o.dim && blocks == o.blocks;
}

SpaceCPtr Space::finite(std::vector<int64_t> moduli) {
    if (moduli.empty()) throw std::invalid_argument("finite space needs at least one modulus");
    for (auto m : moduli)
        if (m < 1) throw std::invalid_argument("moduli must be positive");
    auto s = std::make_shared<Space>();
    s->kind = Kind::Finite;
    s->moduli = std::move(moduli);
    s->dim = static_cast<int64_t>(s->moduli.size());
    if (s->states() > (int64_t(1) << 24)) throw std::invalid_argument("finite space too large");
    return s;
}

SpaceCPtr Space::torus(int64_t d) {
    if (d < 1) throw std::invalid_argument("torus dimension must be positive");
    auto s = std::make_shared<Space>();
    s->kind = Kind::Torus;
    s->dim = d;
    return s;
}

SpaceCPtr Space::aut_torus(std::vector<HypBlock> blocks) {
    if (blocks.empty()) throw std::invalid_argument("automorphism needs at least one block");
    auto s = std::make_shared<Space>();
    s->kind = Kind::AutTorus;
    s->dim = 2 * static_cast<int64_t>(blocks.size());
    s->blocks = std::move(blocks);
    return s;
}

SpaceCPtr Space::product(const std::vector<SpaceCPtr>& parts) {
    if (parts.empty()) throw std::invalid_argument("empty product");
    Kind k = parts[0]->kind;
    for (auto& p : parts)
        if (p->kind != k) throw SpaceMismatch("product of spaces of different kinds");
    if (k == Kind::Finite) {
        std::vector<int64_t> m;
        for (auto& p : parts) m.insert(m.end(), p->moduli.begin(), p->moduli.end());
        return finite(std::move(m));
    }
    if (k == Kind::Torus) {
        int64_t d = 0;
        for (auto& p : parts) d += p->dim;
        return torus(d);
    }
    std::vector<HypBlock> b;
    for (auto& p : parts) b.insert(b.end(), p->blocks.begin(), p->blocks.end());
    return aut_torus(std::move(b));
}

// ---- keys ----

namespace {

size_t key_len(const Space& sp) { return sp.kind == Space::Kind::AutTorus ? 3 * sp.blocks.size() : sp.dim; }

FreqKey conj_key(const Space& sp, const FreqKey& k) {
    FreqKey r = k;
    if (sp.kind == Space::Kind::AutTorus) {
        for (size_t b = 0; b < sp.blocks.size(); ++b) r[3 * b] = -r[3 * b], r[3 * b + 1] = -r[3 * b + 1];
    } else {
        for (auto& x : r) x = -x;
    }
    return r;
}

FreqKey add_keys(const Space& sp, const FreqKey& x, const FreqKey& y) {
    if (sp.kind == Space::Kind::AutTorus) return aut_key_add(sp, x, y);
    FreqKey r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}

}  // namespace

FreqKey aut_key_of(const Space& sp, const std::vector<BigInt>& freq, int budget) {
    if (freq.size() != static_cast<size_t>(sp.dim)) throw SpaceMismatch("frequency dimension mismatch");
    FreqKey key(3 * sp.blocks.size());
    for (size_t b = 0; b < sp.blocks.size(); ++b) {
        auto [v0, e] = sp.blocks[b].canonical(freq[2 * b], freq[2 * b + 1], budget);
        key[3 * b] = v0[0], key[3 * b + 1] = v0[1], key[3 * b + 2] = e;
    }
    return key;
}

FreqKey aut_key_add(const Space& sp, const FreqKey& x, const FreqKey& y, int budget) {
    FreqKey r(x.size());
    for (size_t b = 0; b < sp.blocks.size(); ++b) {
        const int64_t* p = &x[3 * b];
        const int64_t* q = &y[3 * b];
        if (all_zero(p, 2)) {
            std::copy(q, q + 3, r.begin() + 3 * b);
            continue;
        }
        if (all_zero(q, 2)) {
            std::copy(p, p + 3, r.begin() + 3 * b);
            continue;
        }
        if (p[2] > q[2]) std::swap(p, q);
        // A^{ep} (v_p + A^{eq - ep} v_q)
        auto w = sp.blocks[b].apply(q[2] - p[2], q[0], q[1], budget);
        BigInt s1 = w[0] + p[0], s2 = w[1] + p[1];
        auto [v0, m] = sp.blocks[b].canonical(s1, s2, budget);
        r[3 * b] = v0[0], r[3 * b + 1] = v0[1];
        r[3 * b + 2] = (v0[0] == 0 && v0[1] == 0) ? 0 : p[2] + m;
    }
    return r;
}

// ---- Observable ----

Observable Observable::constant(SpaceCPtr sp, cplx c) {
    Observable f;
    f.sp_ = sp;
    if (sp->kind == Space::Kind::Finite) {
        f.table_.assign(sp->states(), c);
    } else if (c != 0.0) {
        f.coef_[FreqKey(key_len(*sp), 0)] = c;
    }
    return f;
}

Observable Observable::character(SpaceCPtr sp, const std::vector<int64_t>& k, cplx c) {
    if (k.size() != static_cast<size_t>(sp->dim)) throw SpaceMismatch("frequency dimension mismatch");
    Observable f;
    f.sp_ = sp;
    if (sp->kind == Space::Kind::Finite) {
        int64_t n = sp->states();
        f.table_.resize(n);
        for (int64_t idx = 0; idx < n; ++idx) {
            auto x = sp->coords(idx);
            Rat ph = 0;
            for (size_t i = 0; i < x.size(); ++i) ph += Rat(mod64(k[i] * x[i], sp->moduli[i]), sp->moduli[i]);
            f.table_[idx] = c * e_rat(ph);
        }
        return f;
    }
    if (c == 0.0) return f;
    if (sp->kind == Space::Kind::Torus) {
        f.coef_[k] = c;
    } else {
        std::vector<BigInt> big(k.begin(), k.end());
        f.coef_[aut_key_of(*sp, big)] = c;
    }
    return f;
}

Observable Observable::trig(SpaceCPtr sp, const std::vector<std::pair<std::vector<int64_t>, cplx>>& terms) {
    Observable f = constant(sp, 0.0);
    for (auto& [k, c] : terms) f += character(sp, k, c);
    return f;
}

Observable Observable::table(SpaceCPtr sp, std::vector<cplx> values) {
    if (sp->kind != Space::Kind::Finite) throw SpaceMismatch("tables live on finite spaces");
    if (values.size() != static_cast<size_t>(sp->states())) throw SpaceMismatch("table size mismatch");
    Observable f;
    f.sp_ = sp;
    f.table_ = std::move(values);
    return f;
}

Observable Observable::from_map(SpaceCPtr sp, FreqMap m) {
    if (sp->kind == Space::Kind::Finite) throw SpaceMismatch("frequency maps live on tori");
    Observable f;
    f.sp_ = sp;
    f.coef_ = std::move(m);
    f.prune();
    return f;
}

void require_same_space(const Observable& f, const Observable& g) {
    if (!f.space() || !g.space() || !(*f.space() == *g.space()))
        throw SpaceMismatch("observables live on different spaces");
}

bool Observable::is_real() const {
    if (is_table())
        return std::all_of(table_.begin(), table_.end(), [](const cplx& v) { return v.imag() == 0.0; });
    for (auto& [k, c] : coef_) {
        auto it = coef_.find(conj_key(*sp_, k));
        if (it == coef_.end() || it->second != std::conj(c)) return false;
    }
    return true;
}

double Observable::sup_bound() const {
    double m = 0;
    if (is_table()) {
        for (auto& v : table_) m = std::max(m, std::abs(v));
    } else {
        for (auto& [k, c] : coef_) m += std::abs(c);
    }
    return m;
}

void Observable::prune(double eps) {
    if (is_table()) return;
    for (auto it = coef_.begin(); it != coef_.end();) {
        if (std::abs(it->second) <= eps) it = coef_.erase(it);
        else ++it;
    }
}

std::string Observable::str() const {
    std::ostringstream os;
    os.precision(6);
    if (is_table()) {
        os << "table[";
        for (size_t i = 0; i < table_.size(); ++i) os << (i ? " " : "") << table_[i];
        os << "]";
        return os.str();
    }
    bool first = true;
    for (auto& [k, c] : coef_) {
        os << (first ? "" : " + ") << c << "*e" << vec_str(k);
        first = false;
    }
    return first ? "0" : os.str();
}

Observable Observable::conj() const {
    Observable g;
    g.sp_ = sp_;
    if (is_table()) {
        g.table_.resize(table_.size());
        for (size_t i = 0; i < table_.size(); ++i) g.table_[i] = std::conj(table_[i]);
    } else {
        for (auto& [k, c] : coef_) g.coef_[conj_key(*sp_, k)] = std::conj(c);
    }
    return g;
}

Observable& Observable::operator+=(const Observable& o) {
    require_same_space(*this, o);
    if (is_table()) {
        for (size_t i = 0; i < table_.size(); ++i) table_[i] += o.table_[i];
    } else {
        for (auto& [k, c] : o.coef_) coef_[k] += c;
        prune();
    }
    return *this;
}

Observable& Observable::operator*=(cplx c) {
    if (is_table()) {
        for (auto& v : table_) v *= c;
    } else {
        for (auto& kv : coef_) kv.second *= c;
        prune();
    }
    return *this;
}

Observable operator-(Observable a, const Observable& b) { return a += (-1.0) * b; }

Observable operator*(const Observable& a, const Observable& b) {
    require_same_space(a, b);
    Observable r;
    r.sp_ = a.sp_;
    if (a.is_table()) {
        r.table_.resize(a.table_.size());
        for (size_t i = 0; i < a.table_.size(); ++i) r.table_[i] = a.table_[i] * b.table_[i];
        return r;
    }
    for (auto& [k1, c1] : a.coef_)
        for (auto& [k2, c2] : b.coef_) r.coef_[add_keys(*a.sp_, k1, k2)] += c1 * c2;
    r.prune();
    return r;
}

bool operator==(const Observable& a, const Observable& b) {
    if (!a.sp_ || !b.sp_ || !(*a.sp_ == *b.sp_)) return false;
    return a.table_ == b.table_ && a.coef_ == b.coef_;
}

cplx integral(const Observable& f) {
    if (f.is_table()) {
        cplx s = 0;
        for (auto& v : f.values()) s += v;
        return s / static_cast<double>(f.values().size());
    }
    auto it = f.coeffs().find(FreqKey(key_len(*f.space()), 0));
    return it == f.coeffs().end() ? cplx(0) : it->second;
}

cplx inner(const Observable& f, const Observable& g) {
    require_same_space(f, g);
    cplx s = 0;
    if (f.is_table()) {
        for (size_t i = 0; i < f.values().size(); ++i) s += f.values()[i] * std::conj(g.values()[i]);
        return s / static_cast<double>(f.values().size());
    }
    for (auto& [k, c] : f.coeffs()) {
        auto it = g.coeffs().find(k);
        if (it != g.coeffs().end()) s += c * std::conj(it->second);
    }
    return s;
}

double l2_norm(const Observable& f) {
    double s = 0;
    if (f.is_table()) {
        for (auto& v : f.values()) s += std::norm(v);
        return std::sqrt(s / static_cast<double>(f.values().size()));
    }
    for (auto& [k, c] : f.coeffs()) s += std::norm(c);
    return std::sqrt(s);
}

double l2_distance(const Observable& f, const Observable& g) {
    require_same_space(f, g);
    return l2_norm(f - g);
}

std::vector<std::pair<std::vector<BigInt>, cplx>> frequencies(const Observable& f, int budget) {
    if (f.is_table()) throw SpaceMismatch("tables have no frequency map");
    std::vector<std::pair<std::vector<BigInt>, cplx>> out;
    const Space& sp = *f.space();
    for (auto& [k, c] : f.coeffs()) {
        std::vector<BigInt> v;
        if (sp.kind == Space::Kind::Torus) {
            v.assign(k.begin(), k.end());
        } else {
            for (size_t b = 0; b < sp.blocks.size(); ++b) {
                auto w = sp.blocks[b].apply(k[3 * b + 2], k[3 * b], k[3 * b + 1], budget);
                v.push_back(w[0]);
                v.push_back(w[1]);
            }
        }
        out.emplace_back(std::move(v), c);
    }
    return out;
}

// ---- System ----

System System::finite_abelian(std::vector<int64_t> moduli, std::vector<std::vector<int64_t>> shifts) {
    System s;
    s.kind_ = Kind::FiniteAbelian;
    s.sp_ = Space::finite(moduli);
    s.ell_ = static_cast<int>(shifts.size());
    for (auto& v : shifts) {
        if (v.size() != moduli.size()) throw std::invalid_argument("shift dimension mismatch");
        for (size_t i = 0; i < v.size(); ++i) v[i] = mod64(v[i], moduli[i]);
    }
    s.shifts_ = std::move(shifts);
    return s;
}

System System::finite_cyclic(int64_t M, const std::vector<int64_t>& shifts) {
    std::vector<std::vector<int64_t>> sh;
    for (auto v : shifts) sh.push_back({v});
    return finite_abelian({M}, sh);
}

System System::torus_rotation(int64_t d, std::vector<std::vector<TaggedReal>> alphas) {
    System s;
    s.kind_ = Kind::TorusRotation;
    s.sp_ = Space::torus(d);
    s.ell_ = static_cast<int>(alphas.size());
    for (auto& a : alphas)
        if (a.size() != static_cast<size_t>(d)) throw std::invalid_argument("rotation vector dimension mismatch");
    s.alphas_ = std::move(alphas);
    return s;
}

System System::toral_automorphism(std::vector<Mat2> blocks, std::vector<std::vector<int64_t>> powers) {
    std::vector<HypBlock> hb;
    for (auto& m : blocks) hb.emplace_back(m);
    System s;
    s.kind_ = Kind::ToralAutomorphism;
    s.sp_ = Space::aut_torus(std::move(hb));
    s.ell_ = static_cast<int>(powers.size());
    for (auto& p : powers)
        if (p.size() != blocks.size()) throw std::invalid_argument("powers must list one exponent per block");
    s.powers_ = std::move(powers);
    return s;
}

namespace {

Mat2 mul2(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

}  // namespace

System System::cat_family(const std::vector<Mat2>& matrices) {
    const Mat2 I{};
    const Mat2* gen = nullptr;
    for (auto& m : matrices) {
        if (m == I) continue;
        if (!gen || std::abs(m.trace()) < std::abs(gen->trace())) gen = &m;
    }
    if (!gen) throw std::invalid_argument("cat family needs a hyperbolic matrix");
    HypBlock check(*gen);
    Mat2 ginv{gen->det() * gen->d, -gen->det() * gen->b, -gen->det() * gen->c, gen->det() * gen->a};
    for (auto& x : matrices)
        for (auto& y : matrices)
            if (!(mul2(x, y) == mul2(y, x))) throw std::invalid_argument("matrices do not commute");
    std::vector<std::vector<int64_t>> powers;
    for (auto& m : matrices) {
        int64_t found = 0;
        bool ok = m == I;
        Mat2 p = I, q = I;
        for (int64_t e = 1; e <= 64 && !ok; ++e) {
            p = mul2(p, *gen);
            q = mul2(q, ginv);
            if (std::abs(p.a) > (int64_t(1) << 40)) break;
            if (p == m) ok = true, found = e;
            else if (q == m) ok = true, found = -e;
        }
        if (!ok) throw std::invalid_argument("matrices must be integer powers of a common generator");
        powers.push_back({found});
    }
    return toral_automorphism({*gen}, powers);
}

bool System::commute_check() const {
    // shifts, rotations and block powers of fixed generators commute by construction
    return true;
}

std::string System::str() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::FiniteAbelian:
            os << "finite_abelian " << sp_->str() << " shifts";
            for (auto& s : shifts_) os << " " << vec_str(s);
            break;
        case Kind::TorusRotation:
            os << "torus_rotation d=" << sp_->dim << " alphas";
            for (auto& a : alphas_) {
                os << " (";
                for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i].str();
                os << ")";
            }
            break;
        case Kind::ToralAutomorphism:
            os << "toral_automorphism blocks";
            for (auto& b : sp_->blocks) {
                auto& U = b.generator();
                os << " [[" << U.a << "," << U.b << "],[" << U.c << "," << U.d << "]]";
            }
            os << " powers";
            for (auto& p : powers_) os << " " << vec_str(p);
            break;
    }
    return os.str();
}

TaggedReal rotation_phase(const System& sys, int j, const std::vector<int64_t>& k) {
    TaggedReal s(0);
    const auto& a = sys.alpha(j);
    for (size_t i = 0; i < k.size(); ++i)
        if (k[i] != 0) s = s + TaggedReal(k[i]) * a[i];
    return s;
}

Observable pullback_vec(const System& sys, const std::vector<int64_t>& v, const Observable& f) {
    if (!(*f.space() == *sys.space())) throw SpaceMismatch("observable does not live on the system's space");
    if (v.size() != static_cast<size_t>(sys.ell())) throw std::invalid_argument("exponent vector length mismatch");
    const Space& sp = *sys.space();
    switch (sys.kind()) {
        case System::Kind::FiniteAbelian: {
            std::vector<int64_t> y(sp.moduli.size(), 0);
            for (int j = 0; j < sys.ell(); ++j)
                for (size_t i = 0; i < y.size(); ++i)
                    y[i] = mod64(y[i] + mod64(v[j], sp.moduli[i]) * sys.shift(j)[i], sp.moduli[i]);
            int64_t n = sp.states();
            std::vector<cplx> t(n);
            for (int64_t idx = 0; idx < n; ++idx) {
                auto x = sp.coords(idx);
                for (size_t i = 0; i < x.size(); ++i) x[i] += y[i];
                t[idx] = f.values()[sp.index(x)];
            }
            return Observable::table(sys.space(), std::move(t));
        }
        case System::Kind::TorusRotation: {
            FreqMap m;
            for (auto& [k, c] : f.coeffs()) {
                std::vector<TaggedReal> th(sys.ell());
                for (int j = 0; j < sys.ell(); ++j) th[j] = rotation_phase(sys, j, k);
                m[k] = c * phase_of(v, th);
            }
            return Observable::from_map(sys.space(), std::move(m));
        }
        case System::Kind::ToralAutomorphism: {
            FreqMap m;
            for (auto& [key, c] : f.coeffs()) {
                FreqKey k = key;
                for (size_t b = 0; b < sp.blocks.size(); ++b) {
                    if (k[3 * b] == 0 && k[3 * b + 1] == 0) continue;
                    for (int j = 0; j < sys.ell(); ++j) k[3 * b + 2] += v[j] * sys.powers(j)[b];
                }
                m[k] += c;
            }
            return Observable::from_map(sys.space(), std::move(m));
        }
    }
    return f;
}

Observable pullback(const System& sys, int j, int64_t n, const Observable& f) {
    if (j < 0 || j >= sys.ell()) throw std::out_of_range("transformation index out of range");
    std::vector<int64_t> v(sys.ell(), 0);
    v[j] = n;
    return pullback_vec(sys, v, f);
}

System product_system(const System& sys) {
    int l = sys.ell();
    const Space& sp = *sys.space();
    switch (sys.kind()) {
        case System::Kind::FiniteAbelian: {
            std::vector<int64_t> mod;
            for (int j = 0; j < l; ++j) mod.insert(mod.end(), sp.moduli.begin(), sp.moduli.end());
            std::vector<std::vector<int64_t>> sh(l, std::vector<int64_t>(mod.size(), 0));
            for (int j = 0; j < l; ++j)
                for (size_t i = 0; i < sp.moduli.size(); ++i) sh[j][j * sp.moduli.size() + i] = sys.shift(j)[i];
            return System::finite_abelian(mod, sh);
        }
        case System::Kind::TorusRotation: {
            int64_t d = sp.dim;
            std::vector<std::vector<TaggedReal>> al(l, std::vector<TaggedReal>(l * d, TaggedReal(0)));
            for (int j = 0; j < l; ++j)
                for (int64_t i = 0; i < d; ++i) al[j][j * d + i] = sys.alpha(j)[i];
            return System::torus_rotation(l * d, al);
        }
        case System::Kind::ToralAutomorphism: {
            std::vector<Mat2> blocks;
            for (int j = 0; j < l; ++j)
                for (auto& b : sp.blocks) blocks.push_back(b.generator());
            size_t B = sp.blocks.size();
            std::vector<std::vector<int64_t>> pw(l, std::vector<int64_t>(l * B, 0));
            for (int j = 0; j < l; ++j)
                for (size_t b = 0; b < B; ++b) pw[j][j * B + b] = sys.powers(j)[b];
            return System::toral_automorphism(blocks, pw);
        }
    }
    return sys;
}

System diagonal_square(const System& sys) {
    int l = sys.ell();
    const Space& sp = *sys.space();
    switch (sys.kind()) {
        case System::Kind::FiniteAbelian: {
            std::vector<int64_t> mod = sp.moduli;
            mod.insert(mod.end(), sp.moduli.begin(), sp.moduli.end());
            std::vector<std::vector<int64_t>> sh;
            for (int j = 0; j < l; ++j) {
                auto v = sys.shift(j);
                v.insert(v.end(), sys.shift(j).begin(), sys.shift(j).end());
                sh.push_back(v);
            }
            return System::finite_abelian(mod, sh);
        }
        case System::Kind::TorusRotation: {
            std::vector<std::vector<TaggedReal>> al;
            for (int j = 0; j < l; ++j) {
                auto v = sys.alpha(j);
                v.insert(v.end(), sys.alpha(j).begin(), sys.alpha(j).end());
                al.push_back(v);
            }
            return System::torus_rotation(2 * sp.dim, al);
        }
        case System::Kind::ToralAutomorphism: {
            std::vector<Mat2> blocks;
            for (int c = 0; c < 2; ++c)
                for (auto& b : sp.blocks) blocks.push_back(b.generator());
            std::vector<std::vector<int64_t>> pw;
            for (int j = 0; j < l; ++j) {
                auto v = sys.powers(j);
                v.insert(v.end(), sys.powers(j).begin(), sys.powers(j).end());
                pw.push_back(v);
            }
            return System::toral_automorphism(blocks, pw);
        }
    }
    return sys;
}

Observable tensor(const std::vector<Observable>& fs) {
    if (fs.empty()) throw std::invalid_argument("empty tensor product");
    std::vector<SpaceCPtr> parts;
    for (auto& f : fs) parts.push_back(f.space());
    SpaceCPtr sp = Space::product(parts);
    if (sp->kind == Space::Kind::Finite) {
        int64_t n = sp->states();
        std::vector<cplx> t(n);
        for (int64_t idx = 0; idx < n; ++idx) {
            int64_t rest = idx;
            cplx v = 1.0;
            for (auto& f : fs) {
                int64_t m = f.space()->states();
                v *= f.values()[rest % m];
                rest /= m;
            }
            t[idx] = v;
        }
        return Observable::table(sp, std::move(t));
    }
    FreqMap cur{{FreqKey{}, cplx(1.0)}};
    for (auto& f : fs) {
        FreqMap next;
        for (auto& [k1, c1] : cur)
            for (auto& [k2, c2] : f.coeffs()) {
                FreqKey k = k1;
                k.insert(k.end(), k2.begin(), k2.end());
                next[k] += c1 * c2;
            }
        cur = std::move(next);
    }
    return Observable::from_map(sp, std::move(cur));
}

}  // namespace hergo
