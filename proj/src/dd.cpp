#include "hergo/dd.hpp"

#include <stdexcept>

namespace hergo {

DD dd_pi() { return {3.141592653589793116e+00, 1.224646799147353207e-16}; }
DD dd_ln2() { return {6.931471805599452862e-01, 2.319046813846299558e-17}; }

DD DD::from_mp(const mp200& v) {
    double h = static_cast<double>(v);
    double l = static_cast<double>(mp200(v - h));
    return ddimpl::quick_two_sum(h, l);
}

DD DD::parse(const std::string& s) {
    try {
        return from_mp(mp200(s));
    } catch (const std::exception&) {
        throw std::invalid_argument("not a decimal number: " + s);
    }
}

std::string DD::str(int digits) const {
    return to_mp().str(digits, std::ios_base::fmtflags(0));
}

DD sqrt(const DD& a) {
    if (a.hi <= 0.0) {
        if (a.hi == 0.0) return DD(0.0);
        throw std::domain_error("sqrt of negative double-double");
    }
    double x = 1.0 / std::sqrt(a.hi);
    double ax = a.hi * x;
    DD r = a - ddimpl::two_prod(ax, ax);
    return ddimpl::two_sum(ax, r.hi * (x * 0.5));
}

DD exp(const DD& a) {
    if (a.hi > 709.0) throw std::overflow_error("exp overflow");
    if (a.hi < -745.0) return DD(0.0);
    const DD ln2 = dd_ln2();
    double m = std::floor(a.hi / ln2.hi + 0.5);
    DD r = a - ln2 * m;
    // r / 2^10, Taylor, then square ten times
    r = r * (1.0 / 1024.0);
    DD term = r;
    DD sum = r;
    for (int i = 2; i <= 14; ++i) {
        term = term * r / static_cast<double>(i);
        sum += term;
        if (std::fabs(term.hi) < 1e-36) break;
    }
    // sum = exp(r) - 1; squaring via (s+1)^2 - 1 = s(s+2)
    for (int i = 0; i < 10; ++i) sum = sum * (sum + 2.0);
    DD res = sum + 1.0;
    return {std::ldexp(res.hi, static_cast<int>(m)), std::ldexp(res.lo, static_cast<int>(m))};
}

DD log(const DD& a) {
    if (a.hi <= 0.0) throw std::domain_error("log of nonpositive double-double");
    if (a.hi == 1.0 && a.lo == 0.0) return DD(0.0);
    DD x = DD(std::log(a.hi));
    // two Newton steps on exp(x) = a
    for (int i = 0; i < 2; ++i) x = x + a * exp(-x) - 1.0;
    return x;
}

DD pow_rational(const DD& x, int64_t p, int64_t q) {
    if (q <= 0) throw std::invalid_argument("pow_rational: q must be positive");
    if (p == 0) return DD(1.0);
    auto ipow = [](DD b, int64_t e) {
        DD r(1.0);
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    };
    bool neg = p < 0;
    int64_t pa = neg ? -p : p;
    DD r;
    if (q == 1 && pa <= 64) {
        r = ipow(x, pa);
    } else if (q == 2 && pa <= 64) {
        r = ipow(sqrt(x), pa);
    } else {
        r = exp(log(x) * (DD::from_int(pa) / DD::from_int(q)));
    }
    return neg ? DD(1.0) / r : r;
}

}  // namespace hergo
