#include "hergo/tagged_real.hpp"

#include <sstream>

namespace hergo {

namespace {

TaggedReal make_flag(const DD& v, bool irr) { return TaggedReal::flagged(v, irr); }

// inverse of an exact nonzero value
TaggedReal inverse_exact(const TaggedReal& y) {
    if (y.kind() == TaggedReal::Kind::Rational) {
        if (y.a() == 0) throw std::domain_error("division by zero");
        return TaggedReal(Rat(1) / y.a());
    }
    // 1/(a+b√d) = (a - b√d)/(a² - b²d); the norm is nonzero since d is not a square
    Rat nrm = y.a() * y.a() - y.b() * y.b() * y.d();
    return TaggedReal::quad(y.a() / nrm, -y.b() / nrm, y.d());
}

}  // namespace

TaggedReal TaggedReal::quad(const Rat& a, const Rat& b, int64_t d) {
    if (d < 0) throw std::domain_error("quadratic irrational needs d >= 0");
    if (b == 0 || d == 0) return TaggedReal(a);
    auto [f, sq] = squarefree_split(d);
    TaggedReal r;
    if (sq == 1) {
        r.a_ = a + b * f;
        return r;
    }
    r.kind_ = Kind::Quad;
    r.a_ = a;
    r.b_ = b * f;
    r.d_ = sq;
    return r;
}

TaggedReal TaggedReal::sqrt_of(int64_t n) {
    if (n < 0) throw std::domain_error("sqrt of negative integer");
    return quad(0, 1, n);
}

TaggedReal TaggedReal::flagged(const DD& v, bool assume_irrational) {
    TaggedReal r;
    r.kind_ = Kind::Flagged;
    r.fv_ = v;
    r.irr_ = assume_irrational;
    return r;
}

std::optional<bool> TaggedReal::is_rational() const {
    switch (kind_) {
        case Kind::Rational: return true;
        case Kind::Quad: return false;
        case Kind::Flagged:
            if (irr_) return false;
            return std::nullopt;
    }
    return std::nullopt;
}

bool TaggedReal::rational_or_throw() const {
    auto r = is_rational();
    if (!r) throw Undecidable("rationality of flagged value " + str() + " is unknown; tag it");
    return *r;
}

bool TaggedReal::is_zero() const {
    if (kind_ == Kind::Rational) return a_ == 0;
    if (kind_ == Kind::Quad) return false;
    return fv_.hi == 0.0 && !irr_;
}

int TaggedReal::sign() const {
    if (kind_ == Kind::Rational) return a_.sign();
    if (kind_ == Kind::Quad) return sign_sqrt_minus(b_, d_, -a_);
    if (fv_.hi == 0.0) {
        if (irr_) throw Undecidable("sign of flagged irrational near zero");
        return 0;
    }
    return fv_.hi > 0 ? 1 : -1;
}

BigInt TaggedReal::floor_exact() const {
    if (kind_ == Kind::Rational) return rat_floor(a_);
    if (kind_ == Kind::Flagged) throw Undecidable("exact floor of flagged value");
    mp200 v = to_mp();
    BigInt m(boost::multiprecision::floor(v));
    // adjust so that m <= x < m+1 holds exactly
    for (int it = 0; it < 4; ++it) {
        if (sign_sqrt_minus(b_, d_, Rat(m) - a_) < 0) {
            m -= 1;  // x < m
        } else if (sign_sqrt_minus(b_, d_, Rat(m + 1) - a_) >= 0) {
            m += 1;  // x >= m+1
        } else {
            return m;
        }
    }
    throw std::logic_error("floor_exact failed to converge");
}

DD TaggedReal::to_dd() const {
    if (kind_ == Kind::Flagged) return fv_;
    if (kind_ == Kind::Rational) return rat_to_dd(a_);
    return DD::from_mp(to_mp());
}

mp200 TaggedReal::to_mp() const {
    if (kind_ == Kind::Flagged) return fv_.to_mp();
    if (kind_ == Kind::Rational) return rat_to_mp(a_);
    return rat_to_mp(a_) + rat_to_mp(b_) * boost::multiprecision::sqrt(mp200(d_));
}

std::string TaggedReal::str() const {
    if (kind_ == Kind::Rational) return rat_str(a_);
    if (kind_ == Kind::Flagged) return std::string(irr_ ? "~" : "~?") + fv_.str(34);
    std::ostringstream os;
    std::string root = "sqrt(" + std::to_string(d_) + ")";
    bool neg = b_ < 0;
    Rat mag = neg ? Rat(-b_) : b_;
    std::string bpart = (mag == 1 ? root : rat_str(mag) + "*" + root);
    if (a_ != 0) {
        os << rat_str(a_) << (neg ? "-" : "+") << bpart;
    } else {
        os << (neg ? "-" : "") << bpart;
    }
    return os.str();
}

TaggedReal operator-(const TaggedReal& x) {
    using K = TaggedReal::Kind;
    if (x.kind() == K::Rational) return TaggedReal(Rat(-x.a()));
    if (x.kind() == K::Quad) return TaggedReal::quad(-x.a(), -x.b(), x.d());
    return make_flag(-x.approx(), x.assume_irrational());
}

TaggedReal operator+(const TaggedReal& x, const TaggedReal& y) {
    using K = TaggedReal::Kind;
    if (x.kind() == K::Rational && y.kind() == K::Rational) return TaggedReal(Rat(x.a() + y.a()));
    if (x.kind() != K::Flagged && y.kind() != K::Flagged) {
        if (x.kind() == K::Rational) return TaggedReal::quad(x.a() + y.a(), y.b(), y.d());
        if (y.kind() == K::Rational) return TaggedReal::quad(x.a() + y.a(), x.b(), x.d());
        if (x.d() == y.d()) return TaggedReal::quad(x.a() + y.a(), x.b() + y.b(), x.d());
        // a + b1√d1 + b2√d2 with distinct squarefree d's is irrational
        return make_flag(x.to_dd() + y.to_dd(), true);
    }
    bool irr = false;
    if (x.kind() == K::Flagged && y.kind() == K::Rational) irr = x.assume_irrational();
    if (y.kind() == K::Flagged && x.kind() == K::Rational) irr = y.assume_irrational();
    return make_flag(x.to_dd() + y.to_dd(), irr);
}

TaggedReal operator-(const TaggedReal& x, const TaggedReal& y) { return x + (-y); }

TaggedReal operator*(const TaggedReal& x, const TaggedReal& y) {
    using K = TaggedReal::Kind;
    if (x.kind() == K::Rational && x.a() == 0) return TaggedReal(0);
    if (y.kind() == K::Rational && y.a() == 0) return TaggedReal(0);
    if (x.kind() == K::Rational && y.kind() == K::Rational) return TaggedReal(Rat(x.a() * y.a()));
    if (x.kind() != K::Flagged && y.kind() != K::Flagged) {
        if (x.kind() == K::Rational) return TaggedReal::quad(x.a() * y.a(), x.a() * y.b(), y.d());
        if (y.kind() == K::Rational) return TaggedReal::quad(x.a() * y.a(), x.b() * y.a(), x.d());
        if (x.d() == y.d())
            return TaggedReal::quad(x.a() * y.a() + x.b() * y.b() * x.d(), x.a() * y.b() + x.b() * y.a(), x.d());
        if (x.a() == 0 && y.a() == 0) return TaggedReal::quad(0, x.b() * y.b(), x.d() * y.d());
        return make_flag(x.to_dd() * y.to_dd(), false);
    }
    bool irr = false;
    if (x.kind() == K::Flagged && y.kind() == K::Rational) irr = x.assume_irrational();
    if (y.kind() == K::Flagged && x.kind() == K::Rational) irr = y.assume_irrational();
    return make_flag(x.to_dd() * y.to_dd(), irr);
}

TaggedReal operator/(const TaggedReal& x, const TaggedReal& y) {
    using K = TaggedReal::Kind;
    if (y.kind() != K::Flagged) return x * inverse_exact(y);
    if (x.kind() == K::Rational && x.a() == 0) return TaggedReal(0);
    bool irr = x.kind() == K::Rational && y.assume_irrational();
    return make_flag(x.to_dd() / y.to_dd(), irr);
}

bool operator==(const TaggedReal& x, const TaggedReal& y) {
    if (x.kind() != y.kind()) return false;
    using K = TaggedReal::Kind;
    if (x.kind() == K::Rational) return x.a() == y.a();
    if (x.kind() == K::Quad) return x.a() == y.a() && x.b() == y.b() && x.d() == y.d();
    return x.approx() == y.approx() && x.assume_irrational() == y.assume_irrational();
}

int compare(const TaggedReal& x, const TaggedReal& y) {
    if (!x.is_exact() || !y.is_exact()) throw Undecidable("comparison involving flagged value");
    TaggedReal diff = x - y;
    if (!diff.is_exact()) {
        // two different quadratic fields: compare a1 + b1√d1 against a2 + b2√d2 by a margin
        mp200 v = x.to_mp() - y.to_mp();
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
    }
    return diff.sign();
}

}  // namespace hergo
