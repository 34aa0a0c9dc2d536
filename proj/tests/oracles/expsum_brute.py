"""Independent brute-force values of A(t,s) for frozen unit-test constants.

A(t,s) = e(us) * mean_{n<=N} e(floor(a(n)) t - floor(beta a(n) + u) s) with a(n) = A1*n + A0.
Coefficients come from mpmath at 50 digits; floors are taken on a float128-free split
n*A1 = n*hi + n*lo so the fractional parts are accurate to about 1e-15.
"""
from fractions import Fraction

import mpmath as mp
import numpy as np

mp.mp.dps = 50
N = 20_000_000


def snap(c):
    # exact rationals lose their exactness in mpmath products such as sqrt(2) / sqrt(2)
    fr = Fraction(float(c)).limit_denominator(1000)
    return mp.mpf(fr.numerator) / fr.denominator if abs(c - mp.mpf(fr.numerator) / fr.denominator) < mp.mpf(10) ** -40 else c


def floors(c1, c0, n):
    c1, c0 = snap(c1), snap(c0)
    hi = float(c1)
    lo = float(c1 - hi)
    c0f = float(c0)
    base = np.floor(n * hi)
    rest = (n * hi - base) + n * lo + c0f
    return base + np.floor(rest)


def A(c1, c0, beta, u, t, s):
    n = np.arange(1, N + 1, dtype=np.float64)
    fa = floors(c1, c0, n)
    fb = floors(beta * c1, beta * c0 + u, n)
    th = float(t % 1)
    sh = float(s % 1)
    ph = np.mod(fa * th, 1.0) - np.mod(fb * sh, 1.0)
    v = np.exp(2j * np.pi * ph).mean()
    return v * complex(mp.expjpi(2 * u * s))


b = mp.sqrt(2)
cases = {
    "generic sqrt3 x, u=1/3, q=0 r=0 s=1/2": (mp.sqrt(3), 0, mp.mpf(1) / 3, 0, 0, mp.mpf(1) / 2),
    "K k=1 p=x u=1/5, q=0 r=0 s=1/2": (1 / b, -mp.mpf(1) / 5 / b, mp.mpf(1) / 5, 0, 0, mp.mpf(1) / 2),
    "L l=3 p=x+1/2 u=1/7, q=1 r=0 s=1/3": (mp.mpf(1) / 3, mp.mpf(1) / 6, mp.mpf(1) / 7, 1, 0, mp.mpf(1) / 3),
    "KL k=1 l=1 p=x u=0, q=0 r=0 s=1/2": (1 / (b + 1), 0, 0, 0, 0, mp.mpf(1) / 2),
    "KL k=-2 l=3 p=2x u=1/4, q=0 r=0 s=1/2": (2 / (3 - 2 * b), mp.mpf(1) / 2 / (3 - 2 * b), mp.mpf(1) / 4, 0, 0,
                                              mp.mpf(1) / 2),
    "linear, q=1 r=1 s=1/3": (1, 0, 0, 1, 1, mp.mpf(1) / 3),
}
for name, (c1, c0, u, q, r, s) in cases.items():
    t = q + b * (r + s)
    v = A(c1, c0, b, u, t, s)
    print(f"{name}: {v.real:.6f} {v.imag:+.6f}i")
