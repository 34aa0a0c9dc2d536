#pragma once

// Double-double arithmetic (about 106 significant bits).
// Algorithms follow the usual error-free transformations (two_sum, fma two_prod).

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace hergo {

using mp200 = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<200, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}
    static DD from_int(int64_t v);
    static DD from_mp(const mp200& v);
    static DD parse(const std::string& s);

    double to_double() const { return hi + lo; }
    mp200 to_mp() const { return mp200(hi) + mp200(lo); }
    std::string str(int digits = 32) const;
};

namespace ddimpl {
inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}
inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}
inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}
}  // namespace ddimpl

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }

inline DD operator+(const DD& a, const DD& b) {
    DD s = ddimpl::two_sum(a.hi, b.hi);
    DD t = ddimpl::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = ddimpl::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return ddimpl::quick_two_sum(s.hi, s.lo);
}
inline DD operator+(const DD& a, double b) {
    DD s = ddimpl::two_sum(a.hi, b);
    s.lo += a.lo;
    return ddimpl::quick_two_sum(s.hi, s.lo);
}
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }
inline DD operator-(const DD& a, double b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
    DD p = ddimpl::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return ddimpl::quick_two_sum(p.hi, p.lo);
}
inline DD operator*(const DD& a, double b) {
    DD p = ddimpl::two_prod(a.hi, b);
    p.lo += a.lo * b;
    return ddimpl::quick_two_sum(p.hi, p.lo);
}
inline DD operator/(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = a - b * q1;
    double q2 = r.hi / b.hi;
    r = r - b * q2;
    double q3 = r.hi / b.hi;
    DD q = ddimpl::quick_two_sum(q1, q2);
    return q + q3;
}
inline DD operator/(const DD& a, double b) { return a / DD(b); }

inline DD& operator+=(DD& a, const DD& b) { return a = a + b; }
inline DD& operator-=(DD& a, const DD& b) { return a = a - b; }
inline DD& operator*=(DD& a, const DD& b) { return a = a * b; }

inline bool operator<(const DD& a, const DD& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const DD& a, const DD& b) { return b < a; }
inline bool operator<=(const DD& a, const DD& b) { return !(b < a); }
inline bool operator>=(const DD& a, const DD& b) { return !(a < b); }
inline bool operator==(const DD& a, const DD& b) { return a.hi == b.hi && a.lo == b.lo; }

inline DD abs(const DD& a) { return a.hi < 0 ? -a : a; }

// Largest integer <= a, returned as DD (exact for |a| < 2^104).
inline DD floor(const DD& a) {
    double f = std::floor(a.hi);
    if (f == a.hi) return ddimpl::quick_two_sum(f, std::floor(a.lo));
    return {f, 0.0};
}
inline DD frac(const DD& a) { return a - floor(a); }

DD sqrt(const DD& a);
DD exp(const DD& a);
DD log(const DD& a);
// x^(p/q) for x > 0.
DD pow_rational(const DD& x, int64_t p, int64_t q);
DD dd_pi();
DD dd_ln2();

inline DD DD::from_int(int64_t v) {
    double h = static_cast<double>(v);
    double l = static_cast<double>(v - static_cast<int64_t>(h));
    return ddimpl::quick_two_sum(h, l);
}

}  // namespace hergo
