#include <atomic>
#include <cmath>

#include "hergo/hardy.hpp"

namespace hergo {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr double kDDRelErr = 0x1p-88;   // per-term relative error bound for the DD path
constexpr double kMPRelErr = 0x1p-185;  // same for the 200-bit path

u128 isqrt_u128(u128 v) {
    if (v == 0) return 0;
    u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

i128 to_i128(const BigInt& x) {
    // x fits in 120 bits
    BigInt ax = boost::multiprecision::abs(x);
    u128 lo = static_cast<uint64_t>(ax & BigInt(UINT64_MAX));
    u128 hi = static_cast<uint64_t>(ax >> 64);
    i128 v = static_cast<i128>((hi << 64) | lo);
    return x < 0 ? -v : v;
}

BigInt from_i128(i128 v) {
    bool neg = v < 0;
    u128 a = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    BigInt r = BigInt(static_cast<uint64_t>(a >> 64));
    r <<= 64;
    r += BigInt(static_cast<uint64_t>(a));
    return neg ? BigInt(-r) : r;
}

BigInt floor_div(const BigInt& a, const BigInt& d) {
    BigInt q = a / d;
    if ((a % d != 0) && ((a < 0) != (d < 0))) q -= 1;
    return q;
}

// Horner with overflow detection; false on overflow
bool horner_i128(const std::vector<i128>& c, i128 n, i128* out) {
    i128 acc = 0;
    for (size_t k = c.size(); k-- > 0;) {
        if (__builtin_mul_overflow(acc, n, &acc)) return false;
        if (__builtin_add_overflow(acc, c[k], &acc)) return false;
    }
    *out = acc;
    return true;
}

BigInt horner_big(const std::vector<BigInt>& c, int64_t n) {
    BigInt acc = 0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * n + c[k];
    return acc;
}

// floor((A + B*sqrt(R)) / D), R >= 0, D > 0
BigInt floor_quad(const BigInt& A, const BigInt& B, const BigInt& R, const BigInt& D) {
    if (B == 0 || R == 0) return floor_div(A, D);
    BigInt r = isqrt(R);
    if (r * r == R) return floor_div(A + B * r, D);
    BigInt s = isqrt(B * B * R);  // floor(|B| sqrt R), never exact
    BigInt S = B > 0 ? s : BigInt(-s - 1);
    return floor_div(A + S, D);
}

// log_b(n) as a rational if it is one
std::optional<Rat> exact_log(int64_t n, int64_t b) {
    if (n == 1) return Rat(0);
    // b = g^j with j maximal
    int64_t g = b, j = 1;
    for (int64_t k = 62; k >= 2; --k) {
        int64_t r = exact_root(b, k);
        if (r >= 2) {
            g = r;
            j = k;
            break;
        }
    }
    int64_t i = 0;
    int64_t m = n;
    while (m % g == 0) {
        m /= g;
        ++i;
    }
    if (m != 1) return std::nullopt;
    return Rat(i, j);
}

std::vector<i128> to_i128_vec(const std::vector<BigInt>& v) {
    std::vector<i128> r;
    for (auto& x : v) r.push_back(to_i128(x));
    return r;
}

}  // namespace

namespace {
std::atomic<bool> g_mp200{true};
}  // namespace

void set_mp200_escalation(bool on) { g_mp200.store(on); }
bool mp200_escalation() { return g_mp200.load(); }

SequenceEvaluator::SequenceEvaluator(const HardyExpr& e) : SequenceEvaluator(e, mp200_escalation()) {}

SequenceEvaluator::SequenceEvaluator(const HardyExpr& e, bool allow_mp200) : e_(e), allow_mp_(allow_mp200) {
    for (auto& t : e_.terms()) {
        coef_dd_.push_back(t.coef.to_dd());
        if (t.atom.log_exp > 0 || !(rat_is_integer(t.atom.power) || rat_den64(t.atom.power) == 2)) need_log_ = true;
    }
    const_dd_ = e_.constant().to_dd();
    if (e_.log_base() != 0) inv_log_base_ = DD(1.0) / log(DD(static_cast<double>(e_.log_base())));

    // exact quadratic form
    std::vector<Rat> A, B;
    int rad = 0;  // 0 unset, 2 d0, 3 n, 4 d0*n
    int64_t d0 = 1;
    bool ok = true;
    auto put = [](std::vector<Rat>& v, size_t k, const Rat& c) {
        if (v.size() <= k) v.resize(k + 1, Rat(0));
        v[k] += c;
    };
    auto want = [&](int r, int64_t d) {
        if (rad == 0) {
            rad = r;
            d0 = d;
        } else if (rad != r || d0 != d) {
            ok = false;
        }
    };
    auto add = [&](const TaggedReal& c, const GrowthAtom& a) {
        if (!ok) return;
        if (a.log_exp > 0 || c.kind() == TaggedReal::Kind::Flagged) {
            ok = false;
            return;
        }
        const Rat& p = a.power;
        if (rat_is_integer(p)) {
            size_t k = static_cast<size_t>(rat_num64(p));
            if (k > 12) {
                ok = false;
                return;
            }
            put(A, k, c.a());
            if (c.kind() == TaggedReal::Kind::Quad) {
                want(2, c.d());
                put(B, k, c.b());
            }
        } else if (rat_den64(p) == 2) {
            size_t k = static_cast<size_t>((rat_num64(p) - 1) / 2);
            if (k > 12) {
                ok = false;
                return;
            }
            if (c.kind() == TaggedReal::Kind::Rational) {
                want(3, 1);
                put(B, k, c.a());
            } else if (c.a() == 0) {
                want(4, c.d());
                put(B, k, c.b());
            } else {
                ok = false;
            }
        } else {
            ok = false;
        }
    };
    for (auto& t : e_.terms()) add(t.coef, t.atom);
    add(e_.constant(), GrowthAtom{});
    if (ok) {
        BigInt D = 1;
        for (auto* v : {&A, &B})
            for (auto& c : *v) D = boost::multiprecision::lcm(D, boost::multiprecision::denominator(c));
        for (auto& c : A) A_.push_back(BigInt(c * Rat(D)));
        for (auto& c : B) B_.push_back(BigInt(c * Rat(D)));
        D_ = D;
        d0_ = d0;
        bool anyB = false;
        for (auto& b : B_) anyB = anyB || b != 0;
        exact_kind_ = anyB ? rad : 1;
        static const BigInt small_lim = BigInt(1) << 40;
        small_ = D_ < small_lim;
        for (auto* v : {&A_, &B_})
            for (auto& c : *v) small_ = small_ && boost::multiprecision::abs(c) < small_lim;
        small_ = small_ && d0_ < (int64_t(1) << 20);
        if (small_) {
            Ai_ = to_i128_vec(A_);
            Bi_ = to_i128_vec(B_);
            Di_ = to_i128(D_);
        }
    }
}

bool SequenceEvaluator::floor_exact_small(int64_t n, __int128* out) const {
    if (exact_kind_ == 0 || !small_ || n >= (int64_t(1) << 40)) return false;
    {
        // fast 128-bit path; falls through to BigInt on overflow
        i128 a = 0, b = 0;
        bool ok = horner_i128(Ai_, n, &a) && horner_i128(Bi_, n, &b);
        i128 R = exact_kind_ == 2 ? d0_ : exact_kind_ == 3 ? n : static_cast<i128>(d0_) * n;
        const i128 D = Di_;
        if (ok) {
            i128 num;
            bool ok2 = true;
            if (exact_kind_ == 1 || b == 0) {
                num = a;
            } else {
                u128 r = isqrt_u128(static_cast<u128>(R));
                if (static_cast<i128>(r * r) == R) {
                    i128 t;
                    ok2 = !__builtin_mul_overflow(b, static_cast<i128>(r), &t) && !__builtin_add_overflow(a, t, &num);
                } else {
                    u128 ub = static_cast<u128>(b < 0 ? -b : b);
                    u128 b2, q;
                    if (ub >= (u128(1) << 62) || __builtin_mul_overflow(ub, ub, &b2) ||
                        __builtin_mul_overflow(b2, static_cast<u128>(R), &q) || q >= (u128(1) << 126)) {
                        ok2 = false;
                    } else {
                        i128 s = static_cast<i128>(isqrt_u128(q));
                        i128 S = b > 0 ? s : -s - 1;
                        ok2 = !__builtin_add_overflow(a, S, &num);
                    }
                }
            }
            if (ok2) {
                i128 q = num / D;
                if (num % D != 0 && num < 0) q -= 1;
                *out = q;
                return true;
            }
        }
    }
    return false;
}

std::optional<BigInt> SequenceEvaluator::floor_exact_form(int64_t n) const {
    if (exact_kind_ == 0) return std::nullopt;
    i128 q;
    if (floor_exact_small(n, &q)) return from_i128(q);
    BigInt a = horner_big(A_, n);
    BigInt b = horner_big(B_, n);
    BigInt R = exact_kind_ == 2 ? BigInt(d0_) : exact_kind_ == 3 ? BigInt(n) : BigInt(d0_) * n;
    return floor_quad(a, exact_kind_ == 1 ? BigInt(0) : b, R, D_);
}

std::optional<BigInt> SequenceEvaluator::floor_exact_terms(int64_t n) const {
    TaggedReal sum = e_.constant();
    if (!sum.is_exact()) return std::nullopt;
    for (auto& t : e_.terms()) {
        if (!t.coef.is_exact()) return std::nullopt;
        TaggedReal v = t.coef;
        const Rat& p = t.atom.power;
        if (p != 0) {
            int64_t pn = rat_num64(p), pd = rat_den64(p);
            if (pn > 40) return std::nullopt;
            int64_t r = pd == 1 ? n : exact_root(n, pd);
            if (r >= 0) {
                BigInt pw = boost::multiprecision::pow(BigInt(r), static_cast<unsigned>(pn));
                v = v * TaggedReal(Rat(pw));
            } else if (pd == 2) {
                BigInt pw = boost::multiprecision::pow(BigInt(n), static_cast<unsigned>((pn - 1) / 2));
                v = v * TaggedReal(Rat(pw)) * TaggedReal::sqrt_of(n);
            } else {
                return std::nullopt;
            }
        }
        if (t.atom.log_exp > 0) {
            if (n == 1) {
                v = TaggedReal(0);
            } else {
                if (e_.log_base() == 0) return std::nullopt;
                auto lg = exact_log(n, e_.log_base());
                if (!lg) return std::nullopt;
                for (int k = 0; k < t.atom.log_exp; ++k) v = v * TaggedReal(*lg);
            }
        }
        sum = sum + v;
        if (!sum.is_exact()) return std::nullopt;
    }
    return sum.floor_exact();
}

DD SequenceEvaluator::value(int64_t n, double* err) const {
    DD x = DD::from_int(n);
    DD lx = (need_log_ && n > 1) ? log(x) : DD(0.0);
    DD L = e_.log_base() ? lx * inv_log_base_ : lx;
    DD sum = const_dd_;
    double mag = std::fabs(const_dd_.hi) * 0x1p-100;
    const auto& terms = e_.terms();
    for (size_t i = 0; i < terms.size(); ++i) {
        const auto& a = terms[i].atom;
        DD v = coef_dd_[i];
        if (a.power != 0) {
            int64_t pn = rat_num64(a.power), pd = rat_den64(a.power);
            if (pd <= 2 && pn <= 64)
                v = v * pow_rational(x, pn, pd);
            else
                v = v * exp(lx * (DD::from_int(pn) / DD::from_int(pd)));
        }
        for (int k = 0; k < a.log_exp; ++k) v = v * L;
        mag += std::fabs(v.hi) * kDDRelErr;
        sum += v;
    }
    if (err) *err = mag + std::fabs(sum.hi) * 0x1p-104;
    return sum;
}

std::optional<int64_t> SequenceEvaluator::floor_at(int64_t n, FloorStats* stats) const {
    if (n < 1) throw DomainError("floor_at needs n >= 1");
    auto to64 = [](const BigInt& b) -> std::optional<int64_t> {
        if (boost::multiprecision::abs(b) > BigInt(INT64_MAX / 2)) return std::nullopt;
        return static_cast<int64_t>(b);
    };
    if (exact_kind_ != 0) {
        i128 q;
        if (floor_exact_small(n, &q)) {
            if (stats) ++stats->exact;
            if (q > INT64_MAX / 2 || q < -(INT64_MAX / 2)) return std::nullopt;
            return static_cast<int64_t>(q);
        }
        auto r = floor_exact_form(n);
        if (stats) ++stats->exact;
        return to64(*r);
    }
    double err = 0.0;
    DD v = value(n, &err);
    DD fl = floor(v);
    double fr = (v - fl).to_double();
    if (fr > err && 1.0 - fr > err && std::fabs(fl.hi) < 0x1p62) {
        if (stats) ++stats->dd;
        return static_cast<int64_t>(fl.hi) + static_cast<int64_t>(fl.lo);
    }
    if (auto ex = floor_exact_terms(n)) {
        if (stats) ++stats->exact;
        return to64(*ex);
    }
    if (allow_mp_) {
        mp200 vm;
        if (n == 1) {
            // every logarithm vanishes and every power is 1
            vm = e_.constant().to_mp();
            for (auto& t : e_.terms())
                if (t.atom.log_exp == 0) vm += t.coef.to_mp();
        } else {
            vm = eval_mp(e_, mp200(n));
        }
        mp200 bound = mp200(err / kDDRelErr + 1.0) * mp200(kMPRelErr);
        mp200 f = boost::multiprecision::floor(vm);
        mp200 frm = vm - f;
        if (frm > bound && 1 - frm > bound) {
            if (stats) ++stats->escalated;
            return to64(BigInt(f));
        }
    }
    if (stats) ++stats->ambiguous;
    return std::nullopt;
}

int64_t floor_iter(const HardyExpr& e, int64_t n) {
    if (n < 1) throw DomainError("floor_iter needs n >= 1");
    SequenceEvaluator ev(e);
    auto r = ev.floor_at(n);
    if (!r) throw AmbiguousFloor("floor of " + e.str() + " at n=" + std::to_string(n) + " is ambiguous");
    return *r;
}

}  // namespace hergo
