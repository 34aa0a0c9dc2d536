#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "hergo/numeric.hpp"

namespace hergo {

struct Undecidable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scalar whose rationality is a property of the representation.
//   Rational   a
//   Quad       a + b*sqrt(d), d squarefree >= 2, b != 0
//   Flagged    approximate value with an assume_irrational flag
class TaggedReal {
public:
    enum class Kind { Rational, Quad, Flagged };

    TaggedReal() = default;
    TaggedReal(int64_t v) : a_(v) {}  // NOLINT: integers convert implicitly
    TaggedReal(const Rat& v) : a_(v) {}  // NOLINT

    static TaggedReal rational(const Rat& v) { return TaggedReal(v); }
    static TaggedReal quad(const Rat& a, const Rat& b, int64_t d);
    static TaggedReal sqrt_of(int64_t n);  // sqrt(n), n >= 0
    static TaggedReal flagged(const DD& v, bool assume_irrational);

    Kind kind() const { return kind_; }
    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }
    int64_t d() const { return d_; }
    const DD& approx() const { return fv_; }
    bool assume_irrational() const { return irr_; }

    // nullopt for a Flagged value without the irrationality flag.
    std::optional<bool> is_rational() const;
    // Throws Undecidable instead of returning nullopt.
    bool rational_or_throw() const;
    bool is_exact() const { return kind_ != Kind::Flagged; }

    bool is_zero() const;
    int sign() const;  // exact unless Flagged
    // floor, exact for Rational and Quad
    BigInt floor_exact() const;
    bool is_integer() const { return kind_ == Kind::Rational && rat_is_integer(a_); }

    DD to_dd() const;
    mp200 to_mp() const;
    double to_double() const { return to_dd().to_double(); }

    std::string str() const;

    friend TaggedReal operator+(const TaggedReal& x, const TaggedReal& y);
    friend TaggedReal operator-(const TaggedReal& x, const TaggedReal& y);
    friend TaggedReal operator*(const TaggedReal& x, const TaggedReal& y);
    friend TaggedReal operator/(const TaggedReal& x, const TaggedReal& y);
    friend TaggedReal operator-(const TaggedReal& x);
    // structural equality for exact values; Flagged compare by bits
    friend bool operator==(const TaggedReal& x, const TaggedReal& y);
    friend bool operator!=(const TaggedReal& x, const TaggedReal& y) { return !(x == y); }

private:
    Kind kind_ = Kind::Rational;
    Rat a_ = 0;
    Rat b_ = 0;
    int64_t d_ = 0;
    DD fv_{};
    bool irr_ = false;
};

// exact three-way comparison when both sides are exact; throws Undecidable otherwise
int compare(const TaggedReal& x, const TaggedReal& y);

}  // namespace hergo
