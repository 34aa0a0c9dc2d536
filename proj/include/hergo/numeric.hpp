#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "hergo/dd.hpp"

namespace hergo {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

BigInt rat_floor(const Rat& x);
Rat rat_frac(const Rat& x);
bool rat_is_integer(const Rat& x);
DD rat_to_dd(const Rat& x);
mp200 rat_to_mp(const Rat& x);
double rat_to_double(const Rat& x);
std::string rat_str(const Rat& x);
Rat rat_parse(const std::string& s);  // "p", "p/q", or a finite decimal
int64_t rat_num64(const Rat& x);      // throws if it does not fit
int64_t rat_den64(const Rat& x);

int64_t gcd64(int64_t a, int64_t b);
int64_t lcm64(int64_t a, int64_t b);
int64_t mod64(int64_t a, int64_t m);  // result in [0, m)
BigInt isqrt(const BigInt& n);         // floor sqrt, n >= 0

// n = f^2 * d with d squarefree (n > 0).
std::pair<int64_t, int64_t> squarefree_split(int64_t n);
bool is_perfect_square(int64_t n);
// exact integer k-th root if n is a perfect k-th power, else -1 (n >= 0)
int64_t exact_root(int64_t n, int64_t k);

// sign of (c*sqrt(d) - r) computed exactly, d > 0
int sign_sqrt_minus(const Rat& c, int64_t d, const Rat& r);

}  // namespace hergo
