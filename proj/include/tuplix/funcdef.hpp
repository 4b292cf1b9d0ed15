#pragma once

#include <map>
#include <vector>

#include "tuplix/term.hpp"

namespace tuplix {

/// Function definitions in scope, by function variable.
using FnEnv = std::map<Name, LambdaPtr>;

inline LambdaPtr make_fn(std::vector<Name> params, DataTerm body) {
    auto fn = std::make_shared<Lambda>();
    fn->params = std::move(params);
    fn->body = std::move(body);
    return fn;
}

namespace fndetail {

/// Data variables occurring free in some definition body; a summation
/// binder below must not capture these.
inline std::set<Name> env_free_vars(const FnEnv& env) {
    std::set<Name> out;
    for (const auto& [f, fn] : env) {
        std::set<Name> v = vars_of(fn->body);
        for (const auto& p : fn->params) v.erase(p);
        out.insert(v.begin(), v.end());
    }
    return out;
}

inline DataTerm expand_data(const DataTerm& t, const FnEnv& env);

inline LambdaPtr expand_lambda(const LambdaPtr& fn, const FnEnv& env) {
    auto out = std::make_shared<Lambda>();
    out->params = fn->params;
    out->body = expand_data(fn->body, env);
    return out;
}

/// Replace applications of defined functions by their instantiated bodies
/// and contract anonymous applications. A function's own name is retired
/// while its body is expanded, so self-application stalls instead of
/// looping; the residue is reported by free_fn_vars.
inline DataTerm expand_data(const DataTerm& t, const FnEnv& env) {
    switch (t->kind) {
        case DtKind::Const:
        case DtKind::Var: return t;
        case DtKind::FnApp: {
            std::vector<DataTerm> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(expand_data(a, env));
            auto it = env.find(t->name);
            if (it == env.end()) return dt_app(t->name, std::move(args));
            FnEnv rest = env;
            rest.erase(t->name);
            return expand_data(contract_lambda(*it->second, args), rest);
        }
        case DtKind::LamApp: {
            std::vector<DataTerm> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(expand_data(a, env));
            return expand_data(contract_lambda(*t->fn, args), env);
        }
        default: {
            std::vector<DataTerm> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(expand_data(a, env));
            auto n = std::make_shared<DtNode>();
            n->kind = t->kind;
            n->value = t->value;
            n->name = t->name;
            n->args = std::move(args);
            return n;
        }
    }
}

inline Tuplix expand(const Tuplix& p, const FnEnv& env) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta: return p;
        case TKind::Test: return t_test(expand_data(p->data, env));
        case TKind::Entry: return t_entry(p->attr, expand_data(p->data, env));
        case TKind::Conj: {
            // A definition conjunct scopes over all its siblings, whatever
            // the order of composition.
            std::vector<Tuplix> items;
            conj_list(p, items);
            FnEnv local = env;
            for (const auto& it : items)
                if (it->kind == TKind::Gamma) local[it->var] = it->fn;
            std::vector<Tuplix> out;
            out.reserve(items.size());
            for (const auto& it : items) out.push_back(expand(it, local));
            return conj_of(out);
        }
        case TKind::Alt: return t_alt(expand(p->a, env), expand(p->b, env));
        case TKind::Sum: {
            Name x = p->var;
            Tuplix body = p->a;
            std::set<Name> danger = env_free_vars(env);
            if (danger.count(x)) {
                std::set<Name> taken = danger;
                auto fv = free_vars(body);
                taken.insert(fv.begin(), fv.end());
                Name f = fresh_name(x, taken);
                body = subst_tuplix(body, x, dt_var(f));
                x = f;
            }
            return t_sum(x, expand(body, env));
        }
        case TKind::Scalar: return t_scalar(expand_data(p->data, env), expand(p->a, env));
        case TKind::Kirch: return t_kirch(expand_data(p->data, env), expand(p->a, env));
        case TKind::Clear: return t_clear(p->attrs, expand(p->a, env));
        case TKind::Select: return t_select(p->attrs, expand(p->a, env));
        case TKind::Encap: return t_encap(p->attrs, expand(p->a, env));
        case TKind::Zeta: return t_zeta(p->var, p->attrs, expand(p->a, env));
        case TKind::Gamma: {
            FnEnv rest = env;
            rest.erase(p->var);
            return t_gamma(p->var, expand_lambda(p->fn, rest));
        }
        case TKind::SumFn: {
            FnEnv inner = env;
            inner.erase(p->var);
            return t_sumfn(p->var, expand(p->a, inner));
        }
    }
    throw malformed_input("corrupt tuplix term");
}

/// Discharge a function binder whose bound name, after expansion, occurs
/// only as its own definition conjuncts. Binders with remaining uses stay.
inline Tuplix drop_fn_binders(const Tuplix& p) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test:
        case TKind::Entry:
        case TKind::Gamma: return p;
        case TKind::Conj: return t_conj(drop_fn_binders(p->a), drop_fn_binders(p->b));
        case TKind::Alt: return t_alt(drop_fn_binders(p->a), drop_fn_binders(p->b));
        case TKind::Sum: return t_sum(p->var, drop_fn_binders(p->a));
        case TKind::Scalar: return t_scalar(p->data, drop_fn_binders(p->a));
        case TKind::Kirch: return t_kirch(p->data, drop_fn_binders(p->a));
        case TKind::Clear: return t_clear(p->attrs, drop_fn_binders(p->a));
        case TKind::Select: return t_select(p->attrs, drop_fn_binders(p->a));
        case TKind::Encap: return t_encap(p->attrs, drop_fn_binders(p->a));
        case TKind::Zeta: return t_zeta(p->var, p->attrs, drop_fn_binders(p->a));
        case TKind::SumFn: {
            Tuplix body = drop_fn_binders(p->a);
            std::vector<Tuplix> items;
            conj_list(body, items);
            std::vector<Tuplix> kept;
            kept.reserve(items.size());
            for (const auto& it : items)
                if (!(it->kind == TKind::Gamma && it->var == p->var)) kept.push_back(it);
            Tuplix rest = conj_of(kept);
            if (!free_fn_vars(rest).count(p->var)) return rest;
            return t_sumfn(p->var, body);
        }
    }
    throw malformed_input("corrupt tuplix term");
}

}  // namespace fndetail

/// Expand every application of a function defined in scope, keeping the
/// definitions themselves in place.
inline Tuplix apply_defs(const Tuplix& p, const FnEnv& outer = {}) {
    return fndetail::expand(p, outer);
}

/// Expand applications, then drop the let-style binders that no longer
/// have uses. Unresolved function machinery survives and is reported by
/// free_fn_vars; a basic form demanded on it raises malformed_input.
inline Tuplix eliminate_defs(const Tuplix& p, const FnEnv& outer = {}) {
    return fndetail::drop_fn_binders(fndetail::expand(p, outer));
}

}  // namespace tuplix
