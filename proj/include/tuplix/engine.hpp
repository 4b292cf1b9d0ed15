#pragma once

#include <map>
#include <set>
#include <utility>

#include "tuplix/basic_form.hpp"
#include "tuplix/flux.hpp"
#include "tuplix/term.hpp"

namespace tuplix {

using NetIo = std::map<Name, UnitIo>;

struct EngineOpts {
    const NetIo* net = nullptr;     // channel classification for annotation nodes
    std::set<Attribute> ambient;    // attribute universe beyond the term itself
    Limits limits;
};

// ---- data-side connectives -------------------------------------------------
//
// Zero tests encode truth: a term testing zero holds. The connectives below
// build the single term whose test expresses the compound.

inline DataTerm tnot(const DataTerm& t) {
    return dt_sub(dt_int(1), dt_mul(t, dt_inv(t)));
}

inline DataTerm tand(const DataTerm& t, const DataTerm& s) {
    return dt_add(dt_mul(t, dt_inv(t)), dt_mul(s, dt_inv(s)));
}

inline DataTerm tor(const DataTerm& t, const DataTerm& s) { return dt_mul(t, s); }

inline DataTerm timp(const DataTerm& t, const DataTerm& s) {
    return dt_mul(tnot(t), s);
}

// ---- structural operator passes ---------------------------------------------

/// Multiply every entry payload; tests and structure unchanged.
inline Tuplix scalar_mul(const DataTerm& t, const Tuplix& p) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test: return p;
        case TKind::Entry: return t_entry(p->attr, dt_mul(t, p->data));
        case TKind::Conj: return t_conj(scalar_mul(t, p->a), scalar_mul(t, p->b));
        case TKind::Alt: return t_alt(scalar_mul(t, p->a), scalar_mul(t, p->b));
        case TKind::Sum: {
            Name x = p->var;
            Tuplix body = p->a;
            if (vars_of(t).count(x)) {
                std::set<Name> taken = free_vars(body);
                auto tv = vars_of(t);
                taken.insert(tv.begin(), tv.end());
                Name f = fresh_name(x, taken);
                body = subst_tuplix(body, x, dt_var(f));
                x = f;
            }
            return t_sum(x, scalar_mul(t, body));
        }
        default:
            throw malformed_input("operator nodes must be eliminated before scaling");
    }
}

/// Erase entries whose attribute lies in the set.
inline Tuplix clear_op(const std::set<Attribute>& erased, const Tuplix& p) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test: return p;
        case TKind::Entry: return erased.count(p->attr) ? t_eps() : p;
        case TKind::Conj: return t_conj(clear_op(erased, p->a), clear_op(erased, p->b));
        case TKind::Alt: return t_alt(clear_op(erased, p->a), clear_op(erased, p->b));
        case TKind::Sum: return t_sum(p->var, clear_op(erased, p->a));
        default:
            throw malformed_input("operator nodes must be eliminated before clearing");
    }
}

/// Keep only entries whose attribute lies in the set; the erased universe is
/// what the term mentions plus the ambient declarations.
inline Tuplix select_op(const std::set<Attribute>& kept, const Tuplix& p,
                        const std::set<Attribute>& ambient = {}) {
    std::set<Attribute> erased = attrs_of(p);
    erased.insert(ambient.begin(), ambient.end());
    for (const auto& a : kept) erased.erase(a);
    return clear_op(erased, p);
}

/// Replace, per alternative, the accumulated payload of each named flat
/// attribute by the test that the accumulation vanishes.
inline Tuplix encapsulate(const std::set<Attribute>& walled, const Tuplix& p,
                          const Limits& lim = {}) {
    for (const auto& a : walled)
        if (a.sign != Sign::Flat)
            throw malformed_input("cannot encapsulate signed attribute " + a.str());
    BasicForm bf = to_basic(p);
    for (auto& alt : bf.alts) {
        for (const auto& a : walled) {
            auto it = alt.entries.find(a);
            if (it == alt.entries.end()) continue;
            alt.tests.push_back(it->second);
            alt.entries.erase(it);
        }
    }
    CanonOpts opt;
    opt.eliminate_binders = true;
    opt.limits = lim;
    return to_term(canon(std::move(bf), opt), lim);
}

// ---- elimination and normalization -------------------------------------------

/// Innermost-first removal of every non-plain node. The result is built from
/// the plain constructors only.
inline Tuplix eliminate_ops(const Tuplix& p, const EngineOpts& opts = {}) {
    switch (p->kind) {
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test:
        case TKind::Entry: return p;
        case TKind::Conj:
            return t_conj(eliminate_ops(p->a, opts), eliminate_ops(p->b, opts));
        case TKind::Alt:
            return t_alt(eliminate_ops(p->a, opts), eliminate_ops(p->b, opts));
        case TKind::Sum: return t_sum(p->var, eliminate_ops(p->a, opts));
        case TKind::Scalar: return scalar_mul(p->data, eliminate_ops(p->a, opts));
        case TKind::Clear: return clear_op(p->attrs, eliminate_ops(p->a, opts));
        case TKind::Select:
            return select_op(p->attrs, eliminate_ops(p->a, opts), opts.ambient);
        case TKind::Encap:
            return encapsulate(p->attrs, eliminate_ops(p->a, opts), opts.limits);
        case TKind::Kirch:
            return kirchhoff_t(p->data, to_flat(eliminate_ops(p->a, opts)));
        case TKind::Zeta: {
            if (!opts.net)
                throw malformed_input("no network in scope for unit " + p->var.str());
            auto it = opts.net->find(p->var);
            if (it == opts.net->end())
                throw malformed_input("unknown unit " + p->var.str());
            return sign_annotate(it->second, p->attrs, eliminate_ops(p->a, opts));
        }
        // Function machinery is the definition pass's job; nodes that
        // survive it are retained here and rejected only once a basic form
        // is demanded.
        case TKind::Gamma: return p;
        case TKind::SumFn: return t_sumfn(p->var, eliminate_ops(p->a, opts));
    }
    throw malformed_input("corrupt tuplix term");
}

/// Canonical form of a plain term, keeping every binder.
inline Tuplix simplify(const Tuplix& p, const Limits& lim = {}) {
    CanonOpts opt;
    opt.limits = lim;
    return to_term(canon(to_basic(p), opt), lim);
}

/// Canonical form of a plain term with binder elimination: pinned binders
/// are substituted away, unconstrained ones dropped.
inline Tuplix sum_elim(const Tuplix& p, const Limits& lim = {}) {
    CanonOpts opt;
    opt.eliminate_binders = true;
    opt.limits = lim;
    return to_term(canon(to_basic(p), opt), lim);
}

/// The full pipeline up to reconstruction: eliminate operator nodes
/// innermost-first, then bring the plain remainder to canonical basic form
/// with binder elimination.
inline BasicForm normal_form(const Tuplix& p, const EngineOpts& opts = {}) {
    CanonOpts opt;
    opt.eliminate_binders = true;
    opt.limits = opts.limits;
    return canon(to_basic(eliminate_ops(p, opts)), opt);
}

/// The full pipeline: eliminate operator nodes innermost-first, then bring
/// the plain remainder to canonical form.
inline Tuplix normalize(const Tuplix& p, const EngineOpts& opts = {}) {
    return to_term(normal_form(p, opts), opts.limits);
}

}  // namespace tuplix
