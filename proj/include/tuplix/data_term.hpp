#pragma once

#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tuplix/errors.hpp"
#include "tuplix/name.hpp"
#include "tuplix/rational.hpp"

namespace tuplix {

enum class DtKind { Const, Var, Neg, Add, Mul, Inv, FnApp, LamApp };

struct DtNode;
using DataTerm = std::shared_ptr<const DtNode>;

/// Anonymous function over data terms. Second-class: appears only inside
/// function definitions and at an application head.
struct Lambda {
    std::vector<Name> params;
    DataTerm body;
};
using LambdaPtr = std::shared_ptr<const Lambda>;

/// Immutable data-term node. Terms are shared freely; all rewriting builds
/// fresh nodes.
struct DtNode {
    DtKind kind;
    Rational value;              // Const
    Name name;                   // Var, FnApp
    std::vector<DataTerm> args;  // Neg/Inv: 1, Add/Mul: 2, FnApp/LamApp: n
    LambdaPtr fn;                // LamApp
};

// ---- constructors ----------------------------------------------------

inline DataTerm dt_const(Rational v) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::Const;
    n->value = std::move(v);
    return n;
}

inline DataTerm dt_int(long long v) { return dt_const(Rational(v)); }

inline DataTerm dt_var(Name x) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::Var;
    n->name = std::move(x);
    return n;
}

inline DataTerm dt_neg(DataTerm t) {
    if (t->kind == DtKind::Const) return dt_const(-t->value);
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::Neg;
    n->args = {std::move(t)};
    return n;
}

inline DataTerm dt_add(DataTerm a, DataTerm b) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::Add;
    n->args = {std::move(a), std::move(b)};
    return n;
}

inline DataTerm dt_mul(DataTerm a, DataTerm b) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::Mul;
    n->args = {std::move(a), std::move(b)};
    return n;
}

inline DataTerm dt_inv(DataTerm t) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::Inv;
    n->args = {std::move(t)};
    return n;
}

inline DataTerm dt_sub(DataTerm a, DataTerm b) { return dt_add(std::move(a), dt_neg(std::move(b))); }
inline DataTerm dt_div(DataTerm a, DataTerm b) { return dt_mul(std::move(a), dt_inv(std::move(b))); }

inline DataTerm dt_app(Name f, std::vector<DataTerm> args) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::FnApp;
    n->name = std::move(f);
    n->args = std::move(args);
    return n;
}

inline DataTerm dt_lam_app(LambdaPtr fn, std::vector<DataTerm> args) {
    auto n = std::make_shared<DtNode>();
    n->kind = DtKind::LamApp;
    n->fn = std::move(fn);
    n->args = std::move(args);
    return n;
}

// ---- variables and substitution ---------------------------------------

inline void collect_vars(const DataTerm& t, std::set<Name>& out) {
    switch (t->kind) {
        case DtKind::Const: return;
        case DtKind::Var: out.insert(t->name); return;
        case DtKind::LamApp: {
            std::set<Name> body;
            collect_vars(t->fn->body, body);
            for (const auto& p : t->fn->params) body.erase(p);
            out.insert(body.begin(), body.end());
            for (const auto& a : t->args) collect_vars(a, out);
            return;
        }
        default:
            for (const auto& a : t->args) collect_vars(a, out);
    }
}

inline std::set<Name> vars_of(const DataTerm& t) {
    std::set<Name> s;
    collect_vars(t, s);
    return s;
}

inline bool mentions_fn_app(const DataTerm& t) {
    if (t->kind == DtKind::FnApp) return true;
    if (t->kind == DtKind::LamApp && mentions_fn_app(t->fn->body)) return true;
    for (const auto& a : t->args)
        if (mentions_fn_app(a)) return true;
    return false;
}

inline void collect_fn_names(const DataTerm& t, std::set<Name>& out) {
    if (t->kind == DtKind::FnApp) out.insert(t->name);
    if (t->kind == DtKind::LamApp) collect_fn_names(t->fn->body, out);
    for (const auto& a : t->args) collect_fn_names(a, out);
}

/// Smallest primed variant of `base` outside `taken`.
inline Name fresh_name(Name base, const std::set<Name>& taken) {
    while (taken.count(base)) base.family += '\'';
    return base;
}

inline DataTerm substitute_data(const DataTerm& t, const Name& x, const DataTerm& s);

inline LambdaPtr substitute_in_lambda(const LambdaPtr& fn, const Name& x, const DataTerm& s) {
    for (const auto& p : fn->params)
        if (p == x) return fn;  // shadowed
    std::set<Name> svars = vars_of(s);
    bool clash = false;
    for (const auto& p : fn->params)
        if (svars.count(p)) clash = true;
    LambdaPtr use = fn;
    if (clash) {
        // Rename parameters clear of the payload before descending.
        std::set<Name> taken = svars;
        auto bvars = vars_of(fn->body);
        taken.insert(bvars.begin(), bvars.end());
        auto fresh = std::make_shared<Lambda>();
        DataTerm body = fn->body;
        for (const auto& p : fn->params) {
            Name q = svars.count(p) ? fresh_name(p, taken) : p;
            taken.insert(q);
            if (!(q == p)) body = substitute_data(body, p, dt_var(q));
            fresh->params.push_back(q);
        }
        fresh->body = body;
        use = fresh;
    }
    auto out = std::make_shared<Lambda>();
    out->params = use->params;
    out->body = substitute_data(use->body, x, s);
    return out;
}

/// Capture-avoiding substitution of `s` for variable `x`.
inline DataTerm substitute_data(const DataTerm& t, const Name& x, const DataTerm& s) {
    switch (t->kind) {
        case DtKind::Const: return t;
        case DtKind::Var: return t->name == x ? s : t;
        case DtKind::LamApp: {
            std::vector<DataTerm> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(substitute_data(a, x, s));
            return dt_lam_app(substitute_in_lambda(t->fn, x, s), std::move(args));
        }
        default: {
            std::vector<DataTerm> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(substitute_data(a, x, s));
            auto n = std::make_shared<DtNode>();
            n->kind = t->kind;
            n->value = t->value;
            n->name = t->name;
            n->args = std::move(args);
            return n;
        }
    }
}

/// Simultaneous, capture-avoiding instantiation of a function body.
inline DataTerm contract_lambda(const Lambda& fn, const std::vector<DataTerm>& args) {
    if (fn.params.size() != args.size())
        throw arity_mismatch("expected " + std::to_string(fn.params.size()) + " argument(s), got " +
                             std::to_string(args.size()));
    // Stage through fresh parameter names so arguments mentioning parameter
    // names cannot be re-captured by later substitutions.
    std::set<Name> taken = vars_of(fn.body);
    for (const auto& a : args) {
        auto v = vars_of(a);
        taken.insert(v.begin(), v.end());
    }
    DataTerm body = fn.body;
    std::vector<Name> staged;
    staged.reserve(fn.params.size());
    for (const auto& p : fn.params) {
        Name stem(p.family + "#");
        stem.index = p.index;
        Name q = fresh_name(stem, taken);
        taken.insert(q);
        staged.push_back(q);
        body = substitute_data(body, p, dt_var(q));
    }
    for (size_t i = 0; i < staged.size(); ++i) body = substitute_data(body, staged[i], args[i]);
    return body;
}

// ---- evaluation --------------------------------------------------------

using Assignment = std::map<Name, Rational>;

/// Exact evaluation with totalized inverse (0^-1 = 0). Free function
/// applications cannot be evaluated.
inline Rational eval_data(const DataTerm& t, const Assignment& env) {
    switch (t->kind) {
        case DtKind::Const: return t->value;
        case DtKind::Var: {
            auto it = env.find(t->name);
            if (it == env.end()) throw unbound_variable("unbound variable " + t->name.str());
            return it->second;
        }
        case DtKind::Neg: return -eval_data(t->args[0], env);
        case DtKind::Add: return eval_data(t->args[0], env) + eval_data(t->args[1], env);
        case DtKind::Mul: return eval_data(t->args[0], env) * eval_data(t->args[1], env);
        case DtKind::Inv: return total_inverse(eval_data(t->args[0], env));
        case DtKind::LamApp: {
            Assignment inner = env;
            if (t->fn->params.size() != t->args.size())
                throw arity_mismatch("wrong argument count in application");
            for (size_t i = 0; i < t->args.size(); ++i)
                inner[t->fn->params[i]] = eval_data(t->args[i], env);
            return eval_data(t->fn->body, inner);
        }
        case DtKind::FnApp:
            throw malformed_input("cannot evaluate free function application " + t->name.str());
    }
    throw malformed_input("corrupt data term");
}

// ---- printing ----------------------------------------------------------

// Binding strength of a printed node: sums 1, prefix minus 2, products and
// fraction literals 3, postfix inverse 5, atoms 6. Negative literals get 0
// so any operator context parenthesizes them.
inline int print_level(const DataTerm& t) {
    switch (t->kind) {
        case DtKind::Const:
            if (t->value < 0) return 0;
            return boost::multiprecision::denominator(t->value) == 1 ? 6 : 3;
        case DtKind::Add: return 1;
        case DtKind::Neg: return 2;
        case DtKind::Mul: return 3;
        case DtKind::Inv: return 5;
        default: return 6;
    }
}

inline void print_data(std::ostream& os, const DataTerm& t);

inline void print_paren(std::ostream& os, const DataTerm& t, int min_level) {
    if (print_level(t) < min_level) {
        os << '(';
        print_data(os, t);
        os << ')';
    } else {
        print_data(os, t);
    }
}

inline void print_data(std::ostream& os, const DataTerm& t) {
    switch (t->kind) {
        case DtKind::Const: os << rational_str(t->value); return;
        case DtKind::Var: os << t->name.str(); return;
        case DtKind::Neg:
            os << '-';
            print_paren(os, t->args[0], 2);
            return;
        case DtKind::Add: {
            print_paren(os, t->args[0], 1);
            const DataTerm& rhs = t->args[1];
            if (rhs->kind == DtKind::Neg) {
                os << " - ";
                print_paren(os, rhs->args[0], 3);
            } else if (rhs->kind == DtKind::Const && rhs->value < 0) {
                os << " - " << rational_str(-rhs->value);
            } else {
                os << " + ";
                print_paren(os, rhs, 2);
            }
            return;
        }
        case DtKind::Mul: {
            // Division sugar: x * y^-1 prints as x / y, unless the left
            // factor is itself a fraction (avoids "1/2 / x").
            const DataTerm& rhs = t->args[1];
            bool frac_lhs = print_level(t->args[0]) == 3 && t->args[0]->kind == DtKind::Const;
            print_paren(os, t->args[0], 3);
            if (rhs->kind == DtKind::Inv && !frac_lhs) {
                os << " / ";
                print_paren(os, rhs->args[0], 6);
            } else {
                os << " * ";
                print_paren(os, rhs, 4);
            }
            return;
        }
        case DtKind::Inv:
            print_paren(os, t->args[0], 6);
            os << "^-1";
            return;
        case DtKind::FnApp: {
            os << t->name.str() << '(';
            for (size_t i = 0; i < t->args.size(); ++i) {
                if (i) os << ", ";
                print_data(os, t->args[i]);
            }
            os << ')';
            return;
        }
        case DtKind::LamApp: {
            os << "(lam ";
            for (size_t i = 0; i < t->fn->params.size(); ++i) {
                if (i) os << ", ";
                os << t->fn->params[i].str();
            }
            os << " . ";
            print_data(os, t->fn->body);
            os << ")(";
            for (size_t i = 0; i < t->args.size(); ++i) {
                if (i) os << ", ";
                print_data(os, t->args[i]);
            }
            os << ')';
            return;
        }
    }
}

inline std::string data_str(const DataTerm& t) {
    std::ostringstream os;
    print_data(os, t);
    return os.str();
}

/// Canonical prefix serialization, used for golden tests and ordering.
inline std::string data_prefix(const DataTerm& t) {
    switch (t->kind) {
        case DtKind::Const: return rational_str(t->value);
        case DtKind::Var: return t->name.str();
        case DtKind::Neg: return "(neg " + data_prefix(t->args[0]) + ")";
        case DtKind::Add: return "(add " + data_prefix(t->args[0]) + " " + data_prefix(t->args[1]) + ")";
        case DtKind::Mul: return "(mul " + data_prefix(t->args[0]) + " " + data_prefix(t->args[1]) + ")";
        case DtKind::Inv: return "(inv " + data_prefix(t->args[0]) + ")";
        case DtKind::FnApp: {
            std::string s = "(app " + t->name.str();
            for (const auto& a : t->args) s += " " + data_prefix(a);
            return s + ")";
        }
        case DtKind::LamApp: {
            std::string s = "(lamapp (lam";
            for (const auto& p : t->fn->params) s += " " + p.str();
            s += " . " + data_prefix(t->fn->body) + ")";
            for (const auto& a : t->args) s += " " + data_prefix(a);
            return s + ")";
        }
    }
    return "?";
}

/// Structural equality (alpha-sensitive; canonical forms make it useful).
inline bool data_equal(const DataTerm& a, const DataTerm& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case DtKind::Const: return a->value == b->value;
        case DtKind::Var: return a->name == b->name;
        case DtKind::FnApp:
            if (!(a->name == b->name)) return false;
            break;
        case DtKind::LamApp:
            if (a->fn->params != b->fn->params || !data_equal(a->fn->body, b->fn->body)) return false;
            break;
        default: break;
    }
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i)
        if (!data_equal(a->args[i], b->args[i])) return false;
    return true;
}

/// Alpha-equivalence of function values: rename both parameter lists to the
/// same staged names (the '#' family never appears in user terms), then
/// compare bodies structurally.
inline bool lambda_equal(const LambdaPtr& a, const LambdaPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->params.size() != b->params.size()) return false;
    DataTerm ba = a->body, bb = b->body;
    for (size_t i = 0; i < a->params.size(); ++i) {
        Name staged("#p", static_cast<long long>(i));
        ba = substitute_data(ba, a->params[i], dt_var(staged));
        bb = substitute_data(bb, b->params[i], dt_var(staged));
    }
    return data_equal(ba, bb);
}

}  // namespace tuplix
