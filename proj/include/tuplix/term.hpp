#pragma once

#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "tuplix/attribute.hpp"
#include "tuplix/data_term.hpp"
#include "tuplix/errors.hpp"

namespace tuplix {

enum class TKind {
    Eps,     // the empty tuplix
    Delta,   // the null tuplix
    Test,    // zero test on a data term
    Entry,   // attribute-quantity pair
    Conj,    // conjunctive composition
    Alt,     // alternative composition
    Sum,     // summation binder over a data variable
    Scalar,  // scalar multiplication of entry payloads
    Clear,   // erase entries with attribute in the set
    Select,  // erase entries with attribute outside the set
    Encap,   // require per-attribute accumulation zero, then erase
    Kirch,   // total-flux-zero constraint with an offset term
    Zeta,    // add signed copies of a unit's tracked entries
    Gamma,   // function definition: binds nothing, defines var as fn
    SumFn,   // summation binder over a function variable
};

struct TNode;
using Tuplix = std::shared_ptr<const TNode>;

struct TNode {
    TKind kind = TKind::Eps;
    DataTerm data;              // Test argument, Entry payload, Scalar factor, Kirch offset
    Attribute attr;             // Entry
    Name var;                   // Sum binder, Gamma/SumFn function variable, Zeta unit
    std::set<Attribute> attrs;  // Clear/Encap set, Zeta tracked set
    LambdaPtr fn;               // Gamma
    Tuplix a, b;                // children
};

inline bool is_eps(const Tuplix& p) { return p->kind == TKind::Eps; }
inline bool is_delta(const Tuplix& p) { return p->kind == TKind::Delta; }

namespace tdetail {
inline Tuplix make(TNode n) { return std::make_shared<TNode>(std::move(n)); }
}  // namespace tdetail

inline Tuplix t_eps() {
    static const Tuplix e = tdetail::make({TKind::Eps});
    return e;
}

inline Tuplix t_delta() {
    static const Tuplix d = tdetail::make({TKind::Delta});
    return d;
}

/// Constant tests decide immediately: a zero argument is void, any other
/// constant nullifies.
inline Tuplix t_test(DataTerm t) {
    if (t->kind == DtKind::Const) return t->value.is_zero() ? t_eps() : t_delta();
    TNode n{TKind::Test};
    n.data = std::move(t);
    return tdetail::make(std::move(n));
}

inline Tuplix t_entry(Attribute a, DataTerm payload) {
    TNode n{TKind::Entry};
    n.attr = std::move(a);
    n.data = std::move(payload);
    return tdetail::make(std::move(n));
}

/// Null absorbs, empty is the unit.
inline Tuplix t_conj(Tuplix x, Tuplix y) {
    if (is_delta(x) || is_delta(y)) return t_delta();
    if (is_eps(x)) return y;
    if (is_eps(y)) return x;
    TNode n{TKind::Conj};
    n.a = std::move(x);
    n.b = std::move(y);
    return tdetail::make(std::move(n));
}

/// Null is the unit of choice.
inline Tuplix t_alt(Tuplix x, Tuplix y) {
    if (is_delta(x)) return y;
    if (is_delta(y)) return x;
    TNode n{TKind::Alt};
    n.a = std::move(x);
    n.b = std::move(y);
    return tdetail::make(std::move(n));
}

std::set<Name> free_vars(const Tuplix& p);

/// Vacuous binders are never built.
inline Tuplix t_sum(Name x, Tuplix body) {
    if (is_eps(body) || is_delta(body)) return body;
    if (!free_vars(body).count(x)) return body;
    TNode n{TKind::Sum};
    n.var = std::move(x);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

inline Tuplix t_scalar(DataTerm t, Tuplix body) {
    if (is_eps(body) || is_delta(body)) return body;
    TNode n{TKind::Scalar};
    n.data = std::move(t);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

inline Tuplix t_clear(std::set<Attribute> attrs, Tuplix body) {
    if (attrs.empty() || is_eps(body) || is_delta(body)) return body;
    TNode n{TKind::Clear};
    n.attrs = std::move(attrs);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

inline Tuplix t_select(std::set<Attribute> attrs, Tuplix body) {
    if (is_eps(body) || is_delta(body)) return body;
    TNode n{TKind::Select};
    n.attrs = std::move(attrs);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

/// The encapsulation set must name flat attributes: there is no defined
/// accumulation semantics for signed copies.
inline Tuplix t_encap(std::set<Attribute> attrs, Tuplix body) {
    for (const auto& a : attrs)
        if (a.sign != Sign::Flat)
            throw malformed_input("cannot encapsulate signed attribute " + a.str());
    if (is_eps(body) || is_delta(body)) return body;
    TNode n{TKind::Encap};
    n.attrs = std::move(attrs);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

inline Tuplix t_kirch(DataTerm offset, Tuplix body) {
    TNode n{TKind::Kirch};
    n.data = std::move(offset);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

inline Tuplix t_zeta(Name unit, std::set<Attribute> tracked, Tuplix body) {
    if (is_eps(body) || is_delta(body)) return body;
    TNode n{TKind::Zeta};
    n.var = std::move(unit);
    n.attrs = std::move(tracked);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

inline Tuplix t_gamma(Name fvar, LambdaPtr fn) {
    TNode n{TKind::Gamma};
    n.var = std::move(fvar);
    n.fn = std::move(fn);
    return tdetail::make(std::move(n));
}

inline Tuplix t_sumfn(Name fvar, Tuplix body) {
    TNode n{TKind::SumFn};
    n.var = std::move(fvar);
    n.a = std::move(body);
    return tdetail::make(std::move(n));
}

// ---- traversal ----------------------------------------------------------

inline void collect_free_vars(const Tuplix& p, std::set<Name>& out) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta: return;
        case TKind::Test:
        case TKind::Entry: {
            auto v = vars_of(p->data);
            out.insert(v.begin(), v.end());
            return;
        }
        case TKind::Conj:
        case TKind::Alt:
            collect_free_vars(p->a, out);
            collect_free_vars(p->b, out);
            return;
        case TKind::Sum: {
            std::set<Name> inner;
            collect_free_vars(p->a, inner);
            inner.erase(p->var);
            out.insert(inner.begin(), inner.end());
            return;
        }
        case TKind::Scalar:
        case TKind::Kirch: {
            auto v = vars_of(p->data);
            out.insert(v.begin(), v.end());
            collect_free_vars(p->a, out);
            return;
        }
        case TKind::Clear:
        case TKind::Select:
        case TKind::Encap:
        case TKind::Zeta:
        case TKind::SumFn: collect_free_vars(p->a, out); return;
        case TKind::Gamma: {
            std::set<Name> inner = vars_of(p->fn->body);
            for (const auto& q : p->fn->params) inner.erase(q);
            out.insert(inner.begin(), inner.end());
            return;
        }
    }
}

inline std::set<Name> free_vars(const Tuplix& p) {
    std::set<Name> out;
    collect_free_vars(p, out);
    return out;
}

/// Function variables occurring free: applications in payloads, the defined
/// name of each definition node; the function binder shadows.
inline void collect_free_fn_vars(const Tuplix& p, std::set<Name>& out) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta: return;
        case TKind::Test:
        case TKind::Entry:
        case TKind::Scalar:
        case TKind::Kirch:
            if (p->data) collect_fn_names(p->data, out);
            if (p->a) collect_free_fn_vars(p->a, out);
            return;
        case TKind::Conj:
        case TKind::Alt:
            collect_free_fn_vars(p->a, out);
            collect_free_fn_vars(p->b, out);
            return;
        case TKind::Gamma:
            out.insert(p->var);
            collect_fn_names(p->fn->body, out);
            return;
        case TKind::SumFn: {
            std::set<Name> inner;
            collect_free_fn_vars(p->a, inner);
            inner.erase(p->var);
            out.insert(inner.begin(), inner.end());
            return;
        }
        default: collect_free_fn_vars(p->a, out); return;
    }
}

inline std::set<Name> free_fn_vars(const Tuplix& p) {
    std::set<Name> out;
    collect_free_fn_vars(p, out);
    return out;
}

inline void collect_attrs(const Tuplix& p, std::set<Attribute>& out) {
    switch (p->kind) {
        case TKind::Entry: out.insert(p->attr); return;
        case TKind::Conj:
        case TKind::Alt:
            collect_attrs(p->a, out);
            collect_attrs(p->b, out);
            return;
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test:
        case TKind::Gamma: return;
        default: collect_attrs(p->a, out); return;
    }
}

inline std::set<Attribute> attrs_of(const Tuplix& p) {
    std::set<Attribute> out;
    collect_attrs(p, out);
    return out;
}

/// True when operator nodes (anything beyond the plain constructors)
/// remain to be eliminated.
inline bool contains_ops(const Tuplix& p) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test:
        case TKind::Entry: return false;
        case TKind::Conj:
        case TKind::Alt: return contains_ops(p->a) || contains_ops(p->b);
        case TKind::Sum: return contains_ops(p->a);
        default: return true;
    }
}

// ---- substitution --------------------------------------------------------

inline Tuplix subst_tuplix(const Tuplix& p, const Name& x, const DataTerm& t) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta: return p;
        case TKind::Test: return t_test(substitute_data(p->data, x, t));
        case TKind::Entry: return t_entry(p->attr, substitute_data(p->data, x, t));
        case TKind::Conj: return t_conj(subst_tuplix(p->a, x, t), subst_tuplix(p->b, x, t));
        case TKind::Alt: return t_alt(subst_tuplix(p->a, x, t), subst_tuplix(p->b, x, t));
        case TKind::Sum: {
            if (p->var == x) return p;
            if (vars_of(t).count(p->var) && free_vars(p->a).count(x)) {
                std::set<Name> taken = free_vars(p->a);
                auto tv = vars_of(t);
                taken.insert(tv.begin(), tv.end());
                Name fresh = fresh_name(p->var, taken);
                Tuplix renamed = subst_tuplix(p->a, p->var, dt_var(fresh));
                return t_sum(fresh, subst_tuplix(renamed, x, t));
            }
            return t_sum(p->var, subst_tuplix(p->a, x, t));
        }
        case TKind::Scalar:
            return t_scalar(substitute_data(p->data, x, t), subst_tuplix(p->a, x, t));
        case TKind::Kirch:
            return t_kirch(substitute_data(p->data, x, t), subst_tuplix(p->a, x, t));
        case TKind::Clear: return t_clear(p->attrs, subst_tuplix(p->a, x, t));
        case TKind::Select: return t_select(p->attrs, subst_tuplix(p->a, x, t));
        case TKind::Encap: return t_encap(p->attrs, subst_tuplix(p->a, x, t));
        case TKind::Zeta: return t_zeta(p->var, p->attrs, subst_tuplix(p->a, x, t));
        case TKind::Gamma: return t_gamma(p->var, substitute_in_lambda(p->fn, x, t));
        case TKind::SumFn: return t_sumfn(p->var, subst_tuplix(p->a, x, t));
    }
    throw malformed_input("corrupt tuplix term");
}

// ---- structural equality ---------------------------------------------------

inline bool tuplix_equal(const Tuplix& p, const Tuplix& q) {
    if (p == q) return true;
    if (p->kind != q->kind) return false;
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta: return true;
        case TKind::Test: return data_equal(p->data, q->data);
        case TKind::Entry: return p->attr == q->attr && data_equal(p->data, q->data);
        case TKind::Conj:
        case TKind::Alt: return tuplix_equal(p->a, q->a) && tuplix_equal(p->b, q->b);
        case TKind::Sum: return p->var == q->var && tuplix_equal(p->a, q->a);
        case TKind::Scalar:
        case TKind::Kirch: return data_equal(p->data, q->data) && tuplix_equal(p->a, q->a);
        case TKind::Clear:
        case TKind::Select:
        case TKind::Encap: return p->attrs == q->attrs && tuplix_equal(p->a, q->a);
        case TKind::Zeta:
            return p->var == q->var && p->attrs == q->attrs && tuplix_equal(p->a, q->a);
        case TKind::Gamma: return p->var == q->var && lambda_equal(p->fn, q->fn);
        case TKind::SumFn: return p->var == q->var && tuplix_equal(p->a, q->a);
    }
    return false;
}

// ---- list views -----------------------------------------------------------

inline void conj_list(const Tuplix& p, std::vector<Tuplix>& out) {
    if (p->kind == TKind::Conj) {
        conj_list(p->a, out);
        conj_list(p->b, out);
    } else {
        out.push_back(p);
    }
}

inline void alt_list(const Tuplix& p, std::vector<Tuplix>& out) {
    if (p->kind == TKind::Alt) {
        alt_list(p->a, out);
        alt_list(p->b, out);
    } else {
        out.push_back(p);
    }
}

inline Tuplix conj_of(const std::vector<Tuplix>& xs) {
    Tuplix out = t_eps();
    for (const auto& x : xs) out = t_conj(out, x);
    return out;
}

inline Tuplix alt_of(const std::vector<Tuplix>& xs) {
    Tuplix out = t_delta();
    for (const auto& x : xs) out = t_alt(out, x);
    return out;
}

}  // namespace tuplix
