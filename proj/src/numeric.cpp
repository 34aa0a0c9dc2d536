#include "hergo/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace hergo {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

BigInt rat_floor(const Rat& x) {
    BigInt n = numerator(x), d = denominator(x);
    BigInt q = n / d;  // truncates toward zero
    if (n < 0 && q * d != n) q -= 1;
    return q;
}

Rat rat_frac(const Rat& x) { return x - Rat(rat_floor(x)); }

bool rat_is_integer(const Rat& x) { return denominator(x) == 1; }

mp200 rat_to_mp(const Rat& x) { return mp200(numerator(x)) / mp200(denominator(x)); }

DD rat_to_dd(const Rat& x) {
    if (denominator(x) == 1 && boost::multiprecision::abs(numerator(x)) < (BigInt(1) << 60))
        return DD::from_int(static_cast<int64_t>(numerator(x)));
    return DD::from_mp(rat_to_mp(x));
}

double rat_to_double(const Rat& x) { return rat_to_dd(x).to_double(); }

std::string rat_str(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

Rat rat_parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos)
            return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rat(BigInt(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        BigInt den = 1;
        for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
        if (digits == "-" || digits.empty()) digits += "0";
        return Rat(BigInt(digits), den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: " + s);
    }
}

int64_t rat_num64(const Rat& x) {
    BigInt n = numerator(x);
    if (boost::multiprecision::abs(n) > BigInt(INT64_MAX)) throw std::overflow_error("numerator exceeds 64 bits");
    return static_cast<int64_t>(n);
}

int64_t rat_den64(const Rat& x) {
    BigInt d = denominator(x);
    if (d > BigInt(INT64_MAX)) throw std::overflow_error("denominator exceeds 64 bits");
    return static_cast<int64_t>(d);
}

int64_t gcd64(int64_t a, int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int64_t lcm64(int64_t a, int64_t b) {
    if (a == 0 || b == 0) return 0;
    return std::abs(a / gcd64(a, b) * b);
}

int64_t mod64(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

BigInt isqrt(const BigInt& n) {
    if (n < 0) throw std::domain_error("isqrt of negative");
    if (n < 2) return n;
    return boost::multiprecision::sqrt(n);
}

std::pair<int64_t, int64_t> squarefree_split(int64_t n) {
    if (n <= 0) throw std::domain_error("squarefree_split needs n > 0");
    int64_t f = 1, d = 1;
    for (int64_t p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) f *= p;
        if (e % 2) d *= p;
    }
    d *= n;
    return {f, d};
}

bool is_perfect_square(int64_t n) {
    if (n < 0) return false;
    int64_t r = static_cast<int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    for (int64_t c = r - 1; c <= r + 1; ++c)
        if (c >= 0 && c * c == n) return true;
    return false;
}

int64_t exact_root(int64_t n, int64_t k) {
    if (n < 0 || k < 1) return -1;
    if (k == 1 || n < 2) return n;
    int64_t r = static_cast<int64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(k))));
    for (int64_t c = std::max<int64_t>(0, r - 1); c <= r + 1; ++c) {
        BigInt p = 1;
        for (int64_t i = 0; i < k; ++i) p *= c;
        if (p == n) return c;
    }
    return -1;
}

int sign_sqrt_minus(const Rat& c, int64_t d, const Rat& r) {
    // sign(c*sqrt(d) - r)
    int sc = c.sign();
    int sr = r.sign();
    if (sc == 0) return -sr;
    if (sc > 0 && sr <= 0) return 1;
    if (sc < 0 && sr >= 0) return sr == 0 ? -1 : -1;
    Rat lhs = c * c * d, rhs = r * r;
    int cmp = lhs.compare(rhs);
    return sc > 0 ? cmp : -cmp;
}

}  // namespace hergo
