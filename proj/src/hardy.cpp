#include "hergo/hardy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hergo {

std::strong_ordering GrowthAtom::operator<=>(const GrowthAtom& o) const {
    if (power < o.power) return std::strong_ordering::less;
    if (power > o.power) return std::strong_ordering::greater;
    return log_exp <=> o.log_exp;
}

// ---------------------------------------------------------------- algebra

namespace {

int merge_base(const HardyExpr& a, const HardyExpr& b) {
    bool la = a.has_logs(), lb = b.has_logs();
    if (la && lb && a.log_base() != b.log_base())
        throw ParseError("mixed logarithm bases in one expression");
    return la ? a.log_base() : (lb ? b.log_base() : std::max(a.log_base(), b.log_base()));
}

}  // namespace

class HardyBuilder {
public:
    static HardyExpr make(std::vector<HardyTerm> terms, TaggedReal c, int base) {
        HardyExpr e;
        e.terms_ = std::move(terms);
        e.constant_ = std::move(c);
        e.log_base_ = base;
        e.normalize();
        return e;
    }
};

void HardyExpr::add_term(const TaggedReal& c, const GrowthAtom& a) {
    if (a.is_unit()) {
        constant_ = constant_ + c;
        return;
    }
    for (auto& t : terms_) {
        if (t.atom == a) {
            t.coef = t.coef + c;
            return;
        }
    }
    terms_.push_back({c, a});
}

void HardyExpr::normalize() {
    std::vector<HardyTerm> merged;
    std::vector<HardyTerm> src = std::move(terms_);
    terms_.clear();
    for (auto& t : src) add_term(t.coef, t.atom);
    std::erase_if(terms_, [](const HardyTerm& t) { return t.coef.is_zero(); });
    std::sort(terms_.begin(), terms_.end(), [](const HardyTerm& a, const HardyTerm& b) { return a.atom > b.atom; });
}

HardyExpr HardyExpr::x() { return monomial(TaggedReal(1), 1, 0, 0); }

HardyExpr HardyExpr::monomial(const TaggedReal& coef, const Rat& power, int log_exp, int log_base) {
    if (power < 0 || log_exp < 0) throw DomainError("growth atoms need nonnegative exponents");
    if (log_base == 1 || log_base < 0) throw DomainError("logarithm base must be >= 2");
    return HardyBuilder::make({{coef, {power, log_exp}}}, TaggedReal(0), log_base);
}

bool HardyExpr::has_logs() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const HardyTerm& t) { return t.atom.log_exp > 0; });
}

GrowthAtom HardyExpr::leading_atom() const { return terms_.empty() ? GrowthAtom{} : terms_.front().atom; }
TaggedReal HardyExpr::leading_coef() const { return terms_.empty() ? constant_ : terms_.front().coef; }

TaggedReal HardyExpr::coef_of(const GrowthAtom& a) const {
    if (a.is_unit()) return constant_;
    for (auto& t : terms_)
        if (t.atom == a) return t.coef;
    return TaggedReal(0);
}

HardyExpr operator+(const HardyExpr& a, const HardyExpr& b) {
    int base = merge_base(a, b);
    std::vector<HardyTerm> t = a.terms();
    t.insert(t.end(), b.terms().begin(), b.terms().end());
    return HardyBuilder::make(std::move(t), a.constant() + b.constant(), base);
}

HardyExpr operator-(const HardyExpr& a) { return TaggedReal(-1) * a; }
HardyExpr operator-(const HardyExpr& a, const HardyExpr& b) { return a + (-b); }

HardyExpr operator*(const TaggedReal& c, const HardyExpr& a) {
    std::vector<HardyTerm> t;
    for (auto& term : a.terms()) t.push_back({c * term.coef, term.atom});
    return HardyBuilder::make(std::move(t), c * a.constant(), a.log_base());
}

HardyExpr operator*(const HardyExpr& a, const HardyExpr& b) {
    int base = merge_base(a, b);
    std::vector<HardyTerm> t;
    auto all = [](const HardyExpr& e) {
        std::vector<HardyTerm> v = e.terms();
        if (!e.constant().is_zero()) v.push_back({e.constant(), {}});
        return v;
    };
    TaggedReal c(0);
    for (auto& x : all(a))
        for (auto& y : all(b)) {
            GrowthAtom at{x.atom.power + y.atom.power, x.atom.log_exp + y.atom.log_exp};
            if (at.is_unit())
                c = c + x.coef * y.coef;
            else
                t.push_back({x.coef * y.coef, at});
        }
    return HardyBuilder::make(std::move(t), c, base);
}

bool operator==(const HardyExpr& a, const HardyExpr& b) {
    if (a.terms().size() != b.terms().size() || a.constant() != b.constant()) return false;
    if (a.has_logs() && a.log_base() != b.log_base()) return false;
    for (size_t i = 0; i < a.terms().size(); ++i)
        if (a.terms()[i].atom != b.terms()[i].atom || a.terms()[i].coef != b.terms()[i].coef) return false;
    return true;
}

// ---------------------------------------------------------------- formatting

namespace {

bool negative_for_print(const TaggedReal& c) {
    switch (c.kind()) {
        case TaggedReal::Kind::Rational: return c.a() < 0;
        case TaggedReal::Kind::Quad: return c.a() == 0 && c.b() < 0;
        case TaggedReal::Kind::Flagged: return c.approx().hi < 0;
    }
    return false;
}

std::string scalar_str(const TaggedReal& c) {
    if (c.kind() == TaggedReal::Kind::Flagged)
        return std::string(c.assume_irrational() ? "~" : "~?") + c.approx().str(52);
    return c.str();
}

std::string atom_str(const GrowthAtom& a, int base) {
    std::string s;
    if (a.power != 0) {
        s = "x";
        if (a.power != 1) s += rat_is_integer(a.power) ? "^" + rat_str(a.power) : "^{" + rat_str(a.power) + "}";
    }
    if (a.log_exp > 0) {
        if (!s.empty()) s += "*";
        s += base == 0 ? "log(x)" : "log_" + std::to_string(base) + "(x)";
        if (a.log_exp > 1) s += "^" + std::to_string(a.log_exp);
    }
    return s;
}

}  // namespace

std::string HardyExpr::str() const {
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const TaggedReal& c, const std::string& atom) {
        bool neg = negative_for_print(c);
        TaggedReal mag = neg ? -c : c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        if (atom.empty()) {
            os << scalar_str(mag);
            return;
        }
        if (mag == TaggedReal(1)) {
            os << atom;
        } else if (mag.kind() == TaggedReal::Kind::Quad && mag.a() != 0) {
            os << "(" << scalar_str(mag) << ")*" << atom;
        } else {
            os << scalar_str(mag) << "*" << atom;
        }
    };
    for (auto& t : terms_) emit(t.coef, atom_str(t.atom, log_base_));
    if (!constant_.is_zero() || terms_.empty()) {
        if (constant_.is_zero())
            os << "0";
        else
            emit(constant_, "");
    }
    return os.str();
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    HardyExpr parse_all() {
        HardyExpr e = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at position " + std::to_string(i_) + " in '" + s_ + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(char c) {
        skip();
        return i_ < s_.size() && s_[i_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        skip();
        size_t st = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        return s_.substr(st, i_ - st);
    }
    std::string number_text() {
        skip();
        size_t st = i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
        if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
            size_t save = i_;
            ++i_;
            if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) ++i_;
            if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            } else {
                i_ = save;
            }
        }
        if (st == i_) fail("expected number");
        return s_.substr(st, i_ - st);
    }
    Rat rational_literal() {
        std::string t = number_text();
        if (t.find_first_of("eE") != std::string::npos) fail("exponent notation needs the ~ float marker");
        return rat_parse(t);
    }

    HardyExpr expr() {
        HardyExpr acc;
        bool neg = accept('-');
        if (!neg) accept('+');
        acc = term();
        if (neg) acc = -acc;
        while (true) {
            if (accept('+'))
                acc = acc + term();
            else if (accept('-'))
                acc = acc - term();
            else
                break;
        }
        return acc;
    }

    HardyExpr term() {
        HardyExpr acc = unary();
        while (true) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (peek('/')) {
                ++i_;
                HardyExpr d = unary();
                if (!d.is_constant() || d.constant().is_zero()) fail("division only by nonzero constants");
                acc = (TaggedReal(1) / d.constant()) * acc;
            } else {
                break;
            }
        }
        return acc;
    }

    HardyExpr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Rat exponent() {
        skip();
        bool braced = accept('{');
        bool paren = !braced && accept('(');
        bool neg = accept('-');
        Rat r = rational_literal();
        // x^2/5 is (x^2)/5; fractional exponents need braces or parentheses
        if ((braced || paren) && accept('/')) r /= rational_literal();
        if (braced) expect('}');
        if (paren) expect(')');
        return neg ? Rat(-r) : r;
    }

    HardyExpr power() {
        HardyExpr b = primary();
        if (!accept('^')) return b;
        Rat r = exponent();
        return raise(b, r);
    }

    HardyExpr raise(const HardyExpr& b, const Rat& r) {
        if (b.is_constant()) {
            const TaggedReal& c = b.constant();
            if (!rat_is_integer(r)) {
                if (c.kind() == TaggedReal::Kind::Rational && c.a() > 0 && r == Rat(1, 2)) {
                    Rat v = c.a();
                    // sqrt(p/q) = sqrt(p*q)/q
                    int64_t p = rat_num64(v), q = rat_den64(v);
                    return HardyExpr(TaggedReal::sqrt_of(p * q) / TaggedReal(q));
                }
                fail("non-integer power of a constant");
            }
            int64_t k = rat_num64(r);
            if (k < 0) {
                if (c.is_zero()) fail("zero to a negative power");
                return raise(HardyExpr(TaggedReal(1) / c), Rat(-k));
            }
            TaggedReal acc(1);
            for (int64_t i = 0; i < k; ++i) acc = acc * c;
            return HardyExpr(acc);
        }
        if (b.terms().size() == 1 && b.constant().is_zero() && b.terms()[0].coef == TaggedReal(1)) {
            const GrowthAtom& a = b.terms()[0].atom;
            Rat le = Rat(a.log_exp) * r;
            if (!rat_is_integer(le)) fail("fractional power of a logarithm");
            Rat p = a.power * r;
            if (p < 0 || le < 0) fail("negative powers are outside the expression class");
            return HardyExpr::monomial(TaggedReal(1), p, static_cast<int>(rat_num64(le)), b.log_base());
        }
        if (!rat_is_integer(r) || r < 0) fail("only nonnegative integer powers of sums");
        HardyExpr acc(TaggedReal(1));
        for (int64_t i = 0; i < rat_num64(r); ++i) acc = acc * b;
        return acc;
    }

    HardyExpr log_of_x(int base) {
        expect('(');
        std::string id = ident();
        if (id != "x") fail("logarithm argument must be x");
        expect(')');
        return HardyExpr::monomial(TaggedReal(1), 0, 1, base);
    }

    HardyExpr primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            HardyExpr e = expr();
            expect(')');
            return e;
        }
        if (c == '~') {
            ++i_;
            bool unknown = accept('?');
            bool neg = accept('-');
            std::string t = number_text();
            DD v = DD::parse(t);
            if (neg) v = -v;
            return HardyExpr(TaggedReal::flagged(v, !unknown));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return HardyExpr(TaggedReal(rational_literal()));
        std::string id = ident();
        if (id.empty()) fail("unexpected character");
        if (id == "x") return HardyExpr::x();
        if (id == "sqrt") {
            expect('(');
            skip();
            if (i_ < s_.size() && s_[i_] == 'x') {
                ++i_;
                expect(')');
                return HardyExpr::monomial(TaggedReal(1), Rat(1, 2));
            }
            HardyExpr inner = expr();
            expect(')');
            return raise(inner, Rat(1, 2));
        }
        if (id == "log" || id == "ln") return log_of_x(0);
        if (id.rfind("log_", 0) == 0 || (id.rfind("log", 0) == 0 && id.size() > 3)) {
            std::string digits = id.substr(id[3] == '_' ? 4 : 3);
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) fail("bad logarithm base");
            int base = std::stoi(digits);
            if (base < 2) fail("logarithm base must be >= 2");
            return log_of_x(base);
        }
        fail("unknown identifier '" + id + "'");
    }
};

}  // namespace

HardyExpr HardyExpr::parse(const std::string& text) { return Parser(text).parse_all(); }

TaggedReal parse_tagged(const std::string& s) {
    HardyExpr e = HardyExpr::parse(s);
    if (!e.is_constant()) throw ParseError("expected a constant, got '" + s + "'");
    return e.constant();
}

// ---------------------------------------------------------------- evaluation

DD eval(const HardyExpr& e, const DD& x) {
    if (x <= DD(1.0)) throw DomainError("eval needs x > 1");
    DD lx = log(x);
    DD L = e.log_base() ? lx / log(DD(static_cast<double>(e.log_base()))) : lx;
    DD sum = e.constant().to_dd();
    for (auto& t : e.terms()) {
        DD v = t.coef.to_dd();
        if (t.atom.power != 0) {
            const Rat& p = t.atom.power;
            int64_t pn = rat_num64(p), pd = rat_den64(p);
            if (pd <= 2 && pn <= 64)
                v = v * pow_rational(x, pn, pd);
            else
                v = v * exp(lx * (DD::from_int(pn) / DD::from_int(pd)));
        }
        for (int k = 0; k < t.atom.log_exp; ++k) v = v * L;
        sum += v;
    }
    return sum;
}

mp200 eval_mp(const HardyExpr& e, const mp200& x) {
    if (x <= 1) throw DomainError("eval needs x > 1");
    mp200 lx = boost::multiprecision::log(x);
    mp200 L = e.log_base() ? mp200(lx / boost::multiprecision::log(mp200(e.log_base()))) : lx;
    mp200 sum = e.constant().to_mp();
    for (auto& t : e.terms()) {
        mp200 v = t.coef.to_mp();
        if (t.atom.power != 0) {
            const Rat& p = t.atom.power;
            if (rat_is_integer(p))
                v *= boost::multiprecision::pow(x, static_cast<int>(rat_num64(p)));
            else
                v *= boost::multiprecision::exp(lx * rat_to_mp(p));
        }
        for (int k = 0; k < t.atom.log_exp; ++k) v *= L;
        sum += v;
    }
    return sum;
}

}  // namespace hergo
