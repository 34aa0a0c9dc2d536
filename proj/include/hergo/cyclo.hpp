#pragma once

#include <complex>
#include <map>
#include <vector>

#include "hergo/tagged_real.hpp"

namespace hergo {

// Finite sum  sum_i c_i * e(rho_i + sigma_i * theta)  with rational c_i, rho_i, sigma_i
// and a fixed irrational algebraic theta.  Distinct sigma give linearly independent
// transcendental factors e(sigma*theta), so the sum vanishes iff every sigma-group
// vanishes in Q(zeta_M); that is decided by reduction modulo the cyclotomic polynomial.
class CycloSum {
public:
    void add(const Rat& coef, const Rat& rho, const Rat& sigma = 0);
    // coefficient in Q or Q(sqrt d); sqrt d is expanded into a Gauss sum
    void add(const TaggedReal& coef, const Rat& rho, const Rat& sigma = 0);
    // phase given as an exact TaggedReal rho + sigma*theta (theta a quadratic irrationality)
    void add_phase(const TaggedReal& coef, const TaggedReal& phase, const TaggedReal& theta);

    bool is_zero() const;
    std::complex<double> value(double theta = 0.0) const;
    std::complex<double> value_dd(const DD& theta) const;
    size_t size() const;

private:
    // sigma -> (rho mod 1 -> coefficient)
    std::map<Rat, std::map<Rat, Rat>> groups_;
};

// sqrt(d) for squarefree d >= 1 as sum of c_k e(phi_k)
std::vector<std::pair<Rat, Rat>> sqrt_as_roots_of_unity(int64_t d);

// coefficients of the M-th cyclotomic polynomial (index = power)
const std::vector<BigInt>& cyclotomic(int64_t M);

// e(x) = exp(2 pi i x), argument reduced mod 1 in double-double first
std::complex<double> expi(const DD& x);
std::complex<double> expi_rat(const Rat& x);

}  // namespace hergo
