#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vhg/errors.hpp"
#include "vhg/rational.hpp"

namespace vhg {

// Node kinds, listed in canonical-order rank: Const < Var < Apply < Power <
// Product < Sum. Ties are broken lexicographically on the printed subterm.
enum class Kind { Constant, Variable, Apply, Power, Product, Sum };

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs, Atan, Asin, Acos };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
        case Func::Atan: return "atan";
        case Func::Asin: return "asin";
        case Func::Acos: return "acos";
    }
    return "?";
}

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr constant(Rational value);
ExprPtr variable(std::string name);
ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr product(std::vector<ExprPtr> factors);
ExprPtr power(ExprPtr base, ExprPtr exponent);
ExprPtr apply(Func f, ExprPtr argument);

// "pi" and "e" parse as symbolic constants. They are stored as reserved
// variable nodes: excluded from free_vars, bound automatically by eval.
inline bool is_reserved_symbol(std::string_view name) {
    return name == "pi" || name == "e";
}

// Immutable, canonical-on-construction expression node. Canonical form
// guarantees:
//   - Sum/Product flattened, constants folded into at most one Const child
//   - products distributed over sums (a sum never appears as a factor)
//   - like factors with rational exponents merged (x*x -> x^2)
//   - integer powers of rationals folded; x^1 -> x, x^0 -> 1
//   - sqrt(u) -> u^(1/2), e^u -> exp(u)
//   - children sorted by the canonical ordering
// Structural equality therefore coincides with printed-form equality, and
// each node caches its printed form and node count.
class Expr : public std::enable_shared_from_this<Expr> {
public:
    Kind kind() const { return kind_; }
    const Rational& value() const { return value_; }
    const std::string& name() const { return name_; }
    Func func() const { return func_; }
    const std::vector<ExprPtr>& children() const { return children_; }
    const ExprPtr& base() const { return children_[0]; }
    const ExprPtr& exponent() const { return children_[1]; }
    const ExprPtr& argument() const { return children_[0]; }

    const std::string& printed() const { return printed_; }
    std::size_t node_count() const { return size_; }
    // True when the printed form starts with an atom that a '^' binds to;
    // negation must parenthesize such terms ("-(x^2)", not "-x^2").
    bool leading_caret() const { return leading_caret_; }

    bool is_const() const { return kind_ == Kind::Constant; }
    bool is_const(const Rational& v) const {
        return kind_ == Kind::Constant && value_ == v;
    }
    bool is_integer_const() const { return is_const() && is_integer(value_); }

private:
    Expr() = default;
    friend ExprPtr constant(Rational);
    friend ExprPtr variable(std::string);
    friend ExprPtr sum(std::vector<ExprPtr>);
    friend ExprPtr product(std::vector<ExprPtr>);
    friend ExprPtr power(ExprPtr, ExprPtr);
    friend ExprPtr apply(Func, ExprPtr);

    static ExprPtr make(Kind k, Rational value, std::string name, Func f,
                        std::vector<ExprPtr> children);

    Kind kind_ = Kind::Constant;
    Rational value_;
    std::string name_;
    Func func_ = Func::Sin;
    std::vector<ExprPtr> children_;
    std::string printed_;
    std::size_t size_ = 1;
    bool leading_caret_ = false;
};

inline bool same(const ExprPtr& a, const ExprPtr& b) {
    return a->printed() == b->printed();
}

namespace detail {

inline int rank(Kind k) { return static_cast<int>(k); }

// Product factors sort ascending (constants first: "2*x"); sum terms sort
// descending by rank, ascending by text (polynomial style: "x^2 + x + 1").
inline bool factor_less(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind() != b->kind()) return rank(a->kind()) < rank(b->kind());
    return a->printed() < b->printed();
}

inline bool term_less(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind() != b->kind()) return rank(a->kind()) > rank(b->kind());
    return a->printed() < b->printed();
}

inline bool is_negative_const(const ExprPtr& e) {
    return e->is_const() && e->value() < 0;
}

// Splits a canonical term into (is_negative, magnitude) for sign-aware
// printing. Magnitude is rebuilt through the factories.
inline std::pair<bool, ExprPtr> split_negation(const ExprPtr& t) {
    if (is_negative_const(t)) return {true, constant(-t->value())};
    if (t->kind() == Kind::Product && is_negative_const(t->children().front())) {
        std::vector<ExprPtr> rest(t->children().begin() + 1, t->children().end());
        rest.insert(rest.begin(), constant(-t->children().front()->value()));
        return {true, product(std::move(rest))};
    }
    return {false, t};
}

inline bool is_denominator_factor(const ExprPtr& f) {
    return f->kind() == Kind::Power && f->exponent()->is_const() &&
           f->exponent()->value() < 0;
}

inline std::string paren(const std::string& s) { return "(" + s + ")"; }

// base^exp with exp known positive (Const > 0 or symbolic).
inline std::string print_power_positive(const ExprPtr& base, const ExprPtr& exp) {
    if (exp->is_const(Rational(1))) {
        Kind k = base->kind();
        if (k == Kind::Sum || k == Kind::Product) return paren(base->printed());
        return base->printed();
    }
    if (exp->is_const(Rational(1, 2))) return "sqrt(" + base->printed() + ")";
    std::string b = base->printed();
    Kind bk = base->kind();
    bool base_parens = bk == Kind::Sum || bk == Kind::Product || bk == Kind::Power ||
                       (base->is_const() &&
                        (base->value() < 0 || !base->is_integer_const()));
    if (base_parens) b = paren(b);
    std::string x = exp->printed();
    Kind xk = exp->kind();
    bool exp_parens = xk == Kind::Sum || xk == Kind::Product ||
                      (exp->is_const() && !exp->is_integer_const());
    if (exp_parens) x = paren(x);
    return b + "^" + x;
}

inline std::string print_node(Kind kind, const Rational& value,
                              const std::string& name, Func f,
                              const std::vector<ExprPtr>& ch) {
    switch (kind) {
        case Kind::Constant:
            return to_string(value);
        case Kind::Variable:
            return name;
        case Kind::Apply:
            return std::string(func_name(f)) + "(" + ch[0]->printed() + ")";
        case Kind::Power: {
            const ExprPtr& base = ch[0];
            const ExprPtr& exp = ch[1];
            if (exp->is_const() && exp->value() < 0)
                return "1/" + print_power_positive(base, constant(-exp->value()));
            return print_power_positive(base, exp);
        }
        case Kind::Product: {
            std::vector<ExprPtr> nums;
            std::vector<ExprPtr> dens;
            for (const auto& c : ch)
                (is_denominator_factor(c) ? dens : nums).push_back(c);
            std::string out;
            if (nums.empty()) {
                out = "1";
            } else {
                std::size_t i = 0;
                bool fuse_minus = false;
                if (nums[0]->is_const()) {
                    if (nums[0]->is_const(Rational(-1)) && nums.size() > 1) {
                        fuse_minus = true;
                    } else {
                        out = nums[0]->printed();
                    }
                    i = 1;
                }
                for (; i < nums.size(); ++i) {
                    std::string part = nums[i]->printed();
                    if (fuse_minus) {
                        if (nums[i]->leading_caret()) part = paren(part);
                        out = "-" + part;
                        fuse_minus = false;
                        continue;
                    }
                    out = out.empty() ? part : out + "*" + part;
                }
            }
            for (const auto& d : dens)
                out += "/" + print_power_positive(d->base(), constant(-d->exponent()->value()));
            return out;
        }
        case Kind::Sum: {
            std::string out;
            bool first = true;
            for (const auto& t : ch) {
                auto [neg, mag] = split_negation(t);
                std::string part = mag->printed();
                if (first) {
                    if (neg && mag->leading_caret()) part = paren(part);
                    out = neg ? "-" + part : part;
                    first = false;
                } else {
                    out += (neg ? " - " : " + ") + part;
                }
            }
            return out;
        }
    }
    return "?";
}

inline bool compute_leading_caret(Kind kind, const std::vector<ExprPtr>& ch,
                                  const std::string& printed) {
    if (kind == Kind::Power) {
        // sqrt(...) and 1/... forms start with a safe token.
        return !printed.empty() && printed[0] != 's' && printed[0] != '1';
    }
    if (kind == Kind::Product) {
        for (const auto& c : ch) {
            if (is_denominator_factor(c)) continue;
            return c->is_const() ? false : c->leading_caret();
        }
        return false;  // pure quotient prints "1/..."
    }
    return false;
}

constexpr std::size_t kMaxExpansionTerms = 100000;

}  // namespace detail

inline ExprPtr Expr::make(Kind k, Rational value, std::string name, Func f,
                          std::vector<ExprPtr> children) {
    auto node = std::shared_ptr<Expr>(new Expr());
    node->kind_ = k;
    node->value_ = std::move(value);
    node->name_ = std::move(name);
    node->func_ = f;
    node->children_ = std::move(children);
    node->size_ = 1;
    for (const auto& c : node->children_) node->size_ += c->node_count();
    node->printed_ =
        detail::print_node(k, node->value_, node->name_, f, node->children_);
    node->leading_caret_ =
        detail::compute_leading_caret(k, node->children_, node->printed_);
    return node;
}

inline ExprPtr constant(Rational value) {
    return Expr::make(Kind::Constant, std::move(value), {}, Func::Sin, {});
}

inline ExprPtr variable(std::string name) {
    return Expr::make(Kind::Variable, 0, std::move(name), Func::Sin, {});
}

inline ExprPtr sum(std::vector<ExprPtr> terms) {
    std::vector<ExprPtr> flat;
    for (auto& t : terms) {
        if (t->kind() == Kind::Sum)
            flat.insert(flat.end(), t->children().begin(), t->children().end());
        else
            flat.push_back(std::move(t));
    }
    Rational c = 0;
    std::vector<ExprPtr> out;
    for (auto& t : flat) {
        if (t->is_const())
            c += t->value();
        else
            out.push_back(std::move(t));
    }
    if (c != 0 || out.empty()) out.push_back(constant(c));
    if (out.size() == 1) return out[0];
    std::stable_sort(out.begin(), out.end(), detail::term_less);
    return Expr::make(Kind::Sum, 0, {}, Func::Sin, std::move(out));
}

inline ExprPtr product(std::vector<ExprPtr> factors) {
    std::vector<ExprPtr> flat;
    for (auto& f : factors) {
        if (f->kind() == Kind::Product)
            flat.insert(flat.end(), f->children().begin(), f->children().end());
        else
            flat.push_back(std::move(f));
    }

    // Distribute over any sum factor so canonical products are sum-free.
    bool has_sum = std::any_of(flat.begin(), flat.end(), [](const ExprPtr& f) {
        return f->kind() == Kind::Sum;
    });
    if (has_sum) {
        std::vector<std::vector<ExprPtr>> expansion{{}};
        for (const auto& f : flat) {
            if (f->kind() != Kind::Sum) {
                for (auto& row : expansion) row.push_back(f);
                continue;
            }
            if (expansion.size() * f->children().size() > detail::kMaxExpansionTerms)
                throw Error("expression expansion too large");
            std::vector<std::vector<ExprPtr>> next;
            next.reserve(expansion.size() * f->children().size());
            for (const auto& row : expansion) {
                for (const auto& term : f->children()) {
                    auto copy = row;
                    copy.push_back(term);
                    next.push_back(std::move(copy));
                }
            }
            expansion = std::move(next);
        }
        std::vector<ExprPtr> terms;
        terms.reserve(expansion.size());
        for (auto& row : expansion) terms.push_back(product(std::move(row)));
        return sum(std::move(terms));
    }

    Rational c = 1;
    std::vector<ExprPtr> rest;
    for (auto& f : flat) {
        if (f->is_const())
            c *= f->value();
        else
            rest.push_back(std::move(f));
    }
    if (c == 0) return constant(0);

    // Merge like bases whose exponents are rational constants (x*x -> x^2).
    std::vector<std::pair<ExprPtr, Rational>> groups;  // base -> exponent
    std::vector<ExprPtr> symbolic;
    for (auto& f : rest) {
        ExprPtr base = f;
        Rational exp = 1;
        if (f->kind() == Kind::Power && f->exponent()->is_const()) {
            base = f->base();
            exp = f->exponent()->value();
        } else if (f->kind() == Kind::Power) {
            symbolic.push_back(std::move(f));
            continue;
        }
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return same(g.first, base); });
        if (it == groups.end())
            groups.emplace_back(std::move(base), std::move(exp));
        else
            it->second += exp;
    }
    std::vector<ExprPtr> out;
    for (auto& [base, exp] : groups) {
        if (exp == 0) continue;
        out.push_back(power(base, constant(exp)));
    }
    out.insert(out.end(), symbolic.begin(), symbolic.end());

    // Merged exponents can resurface constants (2^-1 folds to 1/2).
    std::vector<ExprPtr> cleaned;
    for (auto& f : out) {
        if (f->is_const())
            c *= f->value();
        else
            cleaned.push_back(std::move(f));
    }
    if (c == 0) return constant(0);
    if (c != 1 || cleaned.empty()) cleaned.push_back(constant(c));
    if (cleaned.size() == 1) return cleaned[0];
    std::stable_sort(cleaned.begin(), cleaned.end(), detail::factor_less);
    return Expr::make(Kind::Product, 0, {}, Func::Sin, std::move(cleaned));
}

inline ExprPtr power(ExprPtr base, ExprPtr exponent) {
    if (exponent->is_const()) {
        const Rational& p = exponent->value();
        if (p == 0) return constant(1);
        if (p == 1) return base;
        if (base->is_const() && is_integer(p)) {
            bool zero_negative = base->value() == 0 && p < 0;
            if (!zero_negative && numerator(p) <= 512 && numerator(p) >= -512)
                return constant(
                    pow_int(base->value(), numerator(p).convert_to<std::int64_t>()));
        }
        if (base->kind() == Kind::Product && is_integer(p)) {
            std::vector<ExprPtr> powered;
            for (const auto& f : base->children())
                powered.push_back(power(f, exponent));
            return product(std::move(powered));
        }
        if (base->kind() == Kind::Power && is_integer(p)) {
            // (b^m)^n = b^(m*n) is exact for integer outer exponents.
            return power(base->base(), product({base->exponent(), exponent}));
        }
    }
    if (base->kind() == Kind::Variable && base->name() == "e")
        return apply(Func::Exp, std::move(exponent));
    if (base->is_const(Rational(1))) return constant(1);
    std::vector<ExprPtr> ch{std::move(base), std::move(exponent)};
    return Expr::make(Kind::Power, 0, {}, Func::Sin, std::move(ch));
}

inline ExprPtr apply(Func f, ExprPtr argument) {
    if (f == Func::Sqrt) return power(std::move(argument), constant(Rational(1, 2)));
    if (f == Func::Abs) {
        if (argument->is_const()) return constant(boost::multiprecision::abs(argument->value()));
        if (argument->kind() == Kind::Apply && argument->func() == Func::Abs)
            return argument;
    }
    return Expr::make(Kind::Apply, 0, {}, f, {std::move(argument)});
}

inline ExprPtr negate(ExprPtr e) { return product({constant(-1), std::move(e)}); }

inline const std::string& print(const ExprPtr& e) { return e->printed(); }

inline std::size_t complexity(const ExprPtr& e) { return e->node_count(); }

inline void collect_free_vars(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind() == Kind::Variable) {
        if (!is_reserved_symbol(e->name())) out.insert(e->name());
        return;
    }
    for (const auto& c : e->children()) collect_free_vars(c, out);
}

inline std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> out;
    collect_free_vars(e, out);
    return out;
}

using Bindings = std::map<std::string, double>;

// IEEE double evaluation. Returns nullopt (a domain failure, not an error)
// for ln/sqrt outside their domain, division by zero, and any non-finite
// intermediate. Unbound variables are a caller bug and throw.
inline std::optional<double> eval_at(const ExprPtr& e, const Bindings& bindings) {
    auto finite = [](double v) -> std::optional<double> {
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    };
    switch (e->kind()) {
        case Kind::Constant:
            return finite(to_double(e->value()));
        case Kind::Variable: {
            if (e->name() == "pi") return 3.141592653589793;
            if (e->name() == "e") return 2.718281828459045;
            auto it = bindings.find(e->name());
            if (it == bindings.end()) throw UnboundVariableError(e->name());
            return finite(it->second);
        }
        case Kind::Sum: {
            double acc = 0;
            for (const auto& c : e->children()) {
                auto v = eval_at(c, bindings);
                if (!v) return std::nullopt;
                acc += *v;
            }
            return finite(acc);
        }
        case Kind::Product: {
            double acc = 1;
            for (const auto& c : e->children()) {
                auto v = eval_at(c, bindings);
                if (!v) return std::nullopt;
                acc *= *v;
            }
            return finite(acc);
        }
        case Kind::Power: {
            auto b = eval_at(e->base(), bindings);
            auto p = eval_at(e->exponent(), bindings);
            if (!b || !p) return std::nullopt;
            if (*b == 0.0 && *p < 0.0) return std::nullopt;
            return finite(std::pow(*b, *p));
        }
        case Kind::Apply: {
            auto v = eval_at(e->argument(), bindings);
            if (!v) return std::nullopt;
            double u = *v;
            switch (e->func()) {
                case Func::Sin: return finite(std::sin(u));
                case Func::Cos: return finite(std::cos(u));
                case Func::Tan: return finite(std::tan(u));
                case Func::Exp: return finite(std::exp(u));
                case Func::Ln:
                    if (u <= 0.0) return std::nullopt;
                    return finite(std::log(u));
                case Func::Sqrt:
                    if (u < 0.0) return std::nullopt;
                    return finite(std::sqrt(u));
                case Func::Abs: return finite(std::fabs(u));
                case Func::Atan: return finite(std::atan(u));
                case Func::Asin: return finite(std::asin(u));
                case Func::Acos: return finite(std::acos(u));
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

inline ExprPtr substitute(const ExprPtr& e, const std::string& var,
                          const ExprPtr& replacement) {
    switch (e->kind()) {
        case Kind::Constant:
            return e;
        case Kind::Variable:
            return e->name() == var ? replacement : e;
        case Kind::Apply:
            return apply(e->func(), substitute(e->argument(), var, replacement));
        case Kind::Power:
            return power(substitute(e->base(), var, replacement),
                         substitute(e->exponent(), var, replacement));
        case Kind::Product: {
            std::vector<ExprPtr> ch;
            for (const auto& c : e->children())
                ch.push_back(substitute(c, var, replacement));
            return product(std::move(ch));
        }
        case Kind::Sum: {
            std::vector<ExprPtr> ch;
            for (const auto& c : e->children())
                ch.push_back(substitute(c, var, replacement));
            return sum(std::move(ch));
        }
    }
    return e;
}

}  // namespace vhg
