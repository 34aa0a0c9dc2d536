#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hergo/tagged_real.hpp"

namespace hergo {

using cplx = std::complex<double>;

struct SpaceMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct FrequencyOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultBitBudget = 512;

// 2x2 integer matrix [[a, b], [c, d]]
struct Mat2 {
    int64_t a = 1, b = 0, c = 0, d = 1;
    int64_t det() const { return a * d - b * c; }
    int64_t trace() const { return a + d; }
    Mat2 transpose() const { return {a, c, b, d}; }
    bool operator==(const Mat2&) const = default;
};

// Frequency orbits of a hyperbolic block.  A nonzero frequency u is stored as (v0, e) with
// u = A^e v0, A = U^T, and v0 the unique minimizer of an A-adapted quadratic form on the orbit.
class HypBlock {
public:
    HypBlock() = default;
    explicit HypBlock(const Mat2& U);  // |det U| = 1, real eigenvalues off the unit circle

    const Mat2& generator() const { return U_; }
    // canonical (v0, e) of u; throws FrequencyOverflow beyond the bit budget
    std::pair<std::array<int64_t, 2>, int64_t> canonical(const BigInt& u1, const BigInt& u2,
                                                           int budget = kDefaultBitBudget) const;
    // A^e (v1, v2)
    std::array<BigInt, 2> apply(int64_t e, const BigInt& v1, const BigInt& v2, int budget = kDefaultBitBudget) const;
    double log2_lambda() const { return log2_lambda_; }
    bool operator==(const HypBlock& o) const { return U_ == o.U_; }

private:
    BigInt Q(const BigInt& u1, const BigInt& u2) const;
    Mat2 U_, A_, Ainv_;
    BigInt q11_, q12_, q22_;
    double log2_lambda_ = 0;
};

struct Space {
    enum class Kind { Finite, Torus, AutTorus };
    Kind kind = Kind::Torus;
    std::vector<int64_t> moduli;  // Finite
    int64_t dim = 0;              // Torus dimension, or 2 * blocks for AutTorus
    std::vector<HypBlock> blocks;

    int64_t states() const;  // Finite only
    std::string str() const;
    bool operator==(const Space& o) const;
    // coordinates of a state index (first coordinate fastest)
    std::vector<int64_t> coords(int64_t idx) const;
    int64_t index(const std::vector<int64_t>& x) const;

    static std::shared_ptr<const Space> finite(std::vector<int64_t> moduli);
    static std::shared_ptr<const Space> torus(int64_t d);
    static std::shared_ptr<const Space> aut_torus(std::vector<HypBlock> blocks);
    // cartesian product of copies
    static std::shared_ptr<const Space> product(const std::vector<std::shared_ptr<const Space>>& parts);
};
using SpaceCPtr = std::shared_ptr<const Space>;

using FreqKey = std::vector<int64_t>;
using FreqMap = std::map<FreqKey, cplx>;

// Table on a finite space, or a trigonometric polynomial on a torus.  On an AutTorus the
// key of each block is (v0_1, v0_2, e).
class Observable {
public:
    Observable() = default;

    static Observable constant(SpaceCPtr sp, cplx c);
    // e(k.x) on a torus; e(sum k_i x_i / M_i) on a finite space
    static Observable character(SpaceCPtr sp, const std::vector<int64_t>& k, cplx c = 1.0);
    static Observable trig(SpaceCPtr sp, const std::vector<std::pair<std::vector<int64_t>, cplx>>& terms);
    static Observable table(SpaceCPtr sp, std::vector<cplx> values);
    static Observable from_map(SpaceCPtr sp, FreqMap m);

    const SpaceCPtr& space() const { return sp_; }
    bool is_table() const { return sp_ && sp_->kind == Space::Kind::Finite; }
    const std::vector<cplx>& values() const { return table_; }
    const FreqMap& coeffs() const { return coef_; }
    std::vector<cplx>& values_mut() { return table_; }
    FreqMap& coeffs_mut() { return coef_; }

    bool is_real() const;
    double sup_bound() const;  // max |f| for tables, sum |c_k| for trig polys
    size_t size() const { return is_table() ? table_.size() : coef_.size(); }
    void prune(double eps = 0.0);  // drop coefficients with |c| <= eps
    std::string str() const;

    Observable conj() const;
    Observable& operator+=(const Observable& o);
    Observable& operator*=(cplx c);
    friend Observable operator+(Observable a, const Observable& b) { return a += b; }
    friend Observable operator-(Observable a, const Observable& b);
    friend Observable operator*(cplx c, Observable a) { return a *= c; }
    friend Observable operator*(const Observable& a, const Observable& b);  // pointwise product
    // exact equality of tables / frequency maps
    friend bool operator==(const Observable& a, const Observable& b);

private:
    SpaceCPtr sp_;
    std::vector<cplx> table_;
    FreqMap coef_;
};

void require_same_space(const Observable& f, const Observable& g);

cplx integral(const Observable& f);
cplx inner(const Observable& f, const Observable& g);  // int f conj(g)
double l2_norm(const Observable& f);
double l2_distance(const Observable& f, const Observable& g);

// materialized frequencies of a trig poly, checked against the bit budget
std::vector<std::pair<std::vector<BigInt>, cplx>> frequencies(const Observable& f, int budget = kDefaultBitBudget);

// combine two AutTorus block keys (frequency addition)
FreqKey aut_key_add(const Space& sp, const FreqKey& x, const FreqKey& y, int budget = kDefaultBitBudget);
FreqKey aut_key_of(const Space& sp, const std::vector<BigInt>& freq, int budget = kDefaultBitBudget);

class System {
public:
    enum class Kind { FiniteAbelian, TorusRotation, ToralAutomorphism };

    static System finite_abelian(std::vector<int64_t> moduli, std::vector<std::vector<int64_t>> shifts);
    static System finite_cyclic(int64_t M, const std::vector<int64_t>& shifts);
    static System torus_rotation(int64_t d, std::vector<std::vector<TaggedReal>> alphas);
    // block-diagonal: transformation j acts on block b by blocks[b]^powers[j][b]
    static System toral_automorphism(std::vector<Mat2> blocks, std::vector<std::vector<int64_t>> powers);
    // d = 2: matrices that are integer powers of a common hyperbolic generator
    static System cat_family(const std::vector<Mat2>& matrices);

    Kind kind() const { return kind_; }
    const SpaceCPtr& space() const { return sp_; }
    int ell() const { return ell_; }
    const std::vector<int64_t>& shift(int j) const { return shifts_.at(j); }
    const std::vector<TaggedReal>& alpha(int j) const { return alphas_.at(j); }
    const std::vector<int64_t>& powers(int j) const { return powers_.at(j); }
    bool commute_check() const;
    std::string str() const;

private:
    Kind kind_ = Kind::TorusRotation;
    SpaceCPtr sp_;
    int ell_ = 0;
    std::vector<std::vector<int64_t>> shifts_;
    std::vector<std::vector<TaggedReal>> alphas_;
    std::vector<std::vector<int64_t>> powers_;
};

// f o T_j^n
Observable pullback(const System& sys, int j, int64_t n, const Observable& f);
// f o (T_1^{v_1} ... T_l^{v_l})
Observable pullback_vec(const System& sys, const std::vector<int64_t>& v, const Observable& f);

// product system on X^l, transformation j acting on the j-th factor
System product_system(const System& sys);
// X x X with T_j x T_j on both coordinates
System diagonal_square(const System& sys);
// f_1 (x) ... (x) f_r on the product of their spaces
Observable tensor(const std::vector<Observable>& fs);

// phase k.alpha_j of a frequency under a rotation (exact when possible)
TaggedReal rotation_phase(const System& sys, int j, const std::vector<int64_t>& k);

}  // namespace hergo
