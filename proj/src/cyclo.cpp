#include "hergo/cyclo.hpp"

#include <mutex>
#include <numbers>

namespace hergo {

namespace {

Rat mod1(const Rat& x) { return rat_frac(x); }

int legendre(int64_t a, int64_t p) {
    a = mod64(a, p);
    if (a == 0) return 0;
    int64_t r = 1, b = a, e = (p - 1) / 2;
    while (e > 0) {
        if (e & 1) r = static_cast<int64_t>((__int128)r * b % p);
        b = static_cast<int64_t>((__int128)b * b % p);
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

using Terms = std::vector<std::pair<Rat, Rat>>;

Terms multiply(const Terms& a, const Terms& b) {
    std::map<Rat, Rat> acc;
    for (auto& [ca, pa] : a)
        for (auto& [cb, pb] : b) acc[mod1(pa + pb)] += ca * cb;
    Terms out;
    for (auto& [p, c] : acc)
        if (c != 0) out.push_back({c, p});
    return out;
}

bool group_is_zero(const std::map<Rat, Rat>& g) {
    BigInt M = 1;
    bool any = false;
    for (auto& [rho, c] : g) {
        if (c == 0) continue;
        any = true;
        BigInt den = boost::multiprecision::denominator(rho);
        M = boost::multiprecision::lcm(M, den);
    }
    if (!any) return true;
    if (M > 100000) throw std::runtime_error("cyclotomic zero test: conductor too large");
    int64_t m = static_cast<int64_t>(M);
    // integer polynomial after clearing coefficient denominators
    BigInt L = 1;
    for (auto& [rho, c] : g)
        if (c != 0) L = boost::multiprecision::lcm(L, BigInt(boost::multiprecision::denominator(c)));
    std::vector<BigInt> poly(m, 0);
    for (auto& [rho, c] : g) {
        if (c == 0) continue;
        Rat e = rho * m;
        int64_t k = static_cast<int64_t>(boost::multiprecision::numerator(e)) % m;
        poly[k] += boost::multiprecision::numerator(Rat(c * L));
    }
    const auto& phi = cyclotomic(m);
    int64_t dphi = static_cast<int64_t>(phi.size()) - 1;
    // phi is monic: reduce from the top
    for (int64_t i = m - 1; i >= dphi; --i) {
        if (poly[i] == 0) continue;
        BigInt q = poly[i];
        for (int64_t j = 0; j <= dphi; ++j) poly[i - dphi + j] -= q * phi[j];
    }
    for (int64_t i = 0; i < dphi; ++i)
        if (poly[i] != 0) return false;
    return true;
}

}  // namespace

const std::vector<BigInt>& cyclotomic(int64_t M) {
    static std::map<int64_t, std::vector<BigInt>> cache;
    static std::recursive_mutex mu;
    std::lock_guard<std::recursive_mutex> lock(mu);
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;
    // x^M - 1 divided by Phi_d for every proper divisor d
    std::vector<BigInt> num(M + 1, 0);
    num[0] = -1;
    num[M] = 1;
    for (int64_t d = 1; d < M; ++d) {
        if (M % d) continue;
        const std::vector<BigInt>& den = cyclotomic(d);
        int64_t dn = static_cast<int64_t>(num.size()) - 1, dd = static_cast<int64_t>(den.size()) - 1;
        std::vector<BigInt> q(dn - dd + 1, 0);
        for (int64_t i = dn; i >= dd; --i) {
            BigInt c = num[i];
            q[i - dd] = c;
            if (c == 0) continue;
            for (int64_t j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
        }
        num = q;
    }
    return cache.emplace(M, num).first->second;
}

std::vector<std::pair<Rat, Rat>> sqrt_as_roots_of_unity(int64_t d) {
    if (d <= 0) throw std::domain_error("sqrt_as_roots_of_unity needs d >= 1");
    Terms acc{{Rat(1), Rat(0)}};
    int64_t rest = d;
    if (rest % 4 == 0) throw std::domain_error("d must be squarefree");
    if (rest % 2 == 0) {
        acc = multiply(acc, {{Rat(1), Rat(1, 8)}, {Rat(1), Rat(7, 8)}});
        rest /= 2;
    }
    for (int64_t p = 3; rest > 1; p += 2) {
        if (p * p > rest) p = rest;
        if (rest % p) continue;
        rest /= p;
        if (rest % p == 0) throw std::domain_error("d must be squarefree");
        Terms g;
        for (int64_t a = 1; a < p; ++a) g.push_back({Rat(legendre(a, p)), Rat(a, p)});
        if (p % 4 == 3) g = multiply(g, {{Rat(1), Rat(3, 4)}});  // sqrt(-p) * (-i)
        acc = multiply(acc, g);
    }
    return acc;
}

std::complex<double> expi(const DD& x) {
    DD f = frac(x);
    double a = 2.0 * std::numbers::pi * f.to_double();
    return {std::cos(a), std::sin(a)};
}

std::complex<double> expi_rat(const Rat& x) { return expi(rat_to_dd(rat_frac(x))); }

void CycloSum::add(const Rat& coef, const Rat& rho, const Rat& sigma) {
    if (coef == 0) return;
    groups_[sigma][mod1(rho)] += coef;
}

void CycloSum::add(const TaggedReal& coef, const Rat& rho, const Rat& sigma) {
    if (coef.kind() == TaggedReal::Kind::Flagged) throw Undecidable("CycloSum coefficient must be exact");
    add(coef.a(), rho, sigma);
    if (coef.kind() == TaggedReal::Kind::Quad)
        for (auto& [c, ph] : sqrt_as_roots_of_unity(coef.d())) add(coef.b() * c, rho + ph, sigma);
}

void CycloSum::add_phase(const TaggedReal& coef, const TaggedReal& phase, const TaggedReal& theta) {
    if (phase.kind() == TaggedReal::Kind::Rational) return add(coef, phase.a(), 0);
    if (phase.kind() != TaggedReal::Kind::Quad || theta.kind() != TaggedReal::Kind::Quad ||
        phase.d() != theta.d())
        throw Undecidable("phase " + phase.str() + " is not in Q + Q*" + theta.str());
    // phase = a + b sqrt d = rho + sigma (ta + tb sqrt d)
    Rat sigma = phase.b() / theta.b();
    Rat rho = phase.a() - sigma * theta.a();
    add(coef, rho, sigma);
}

bool CycloSum::is_zero() const {
    for (auto& [sigma, g] : groups_)
        if (!group_is_zero(g)) return false;
    return true;
}

std::complex<double> CycloSum::value_dd(const DD& theta) const {
    std::complex<double> s = 0;
    for (auto& [sigma, g] : groups_)
        for (auto& [rho, c] : g) s += rat_to_double(c) * expi(rat_to_dd(rho) + rat_to_dd(sigma) * theta);
    return s;
}

std::complex<double> CycloSum::value(double theta) const { return value_dd(DD(theta)); }

size_t CycloSum::size() const {
    size_t n = 0;
    for (auto& [s, g] : groups_) n += g.size();
    return n;
}

}  // namespace hergo
