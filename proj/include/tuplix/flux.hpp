#pragma once

#include <set>
#include <utility>
#include <vector>

#include "tuplix/term.hpp"

namespace tuplix {

/// Channel sets of one network unit, by attribute name.
struct UnitIo {
    std::set<Name> in, out;
};

// ---- flat / signed conversions ---------------------------------------------

/// Rewrite signed entries to the neutral flat notation: an outflux copy
/// +a(t) becomes a(t), an influx copy -a(t) becomes a(-t).
inline Tuplix to_flat(const Tuplix& p) {
    switch (p->kind) {
        case TKind::Entry:
            if (p->attr.sign == Sign::Plus) return t_entry(Attribute(p->attr.name), p->data);
            if (p->attr.sign == Sign::Minus)
                return t_entry(Attribute(p->attr.name), dt_neg(p->data));
            return p;
        case TKind::Conj: return t_conj(to_flat(p->a), to_flat(p->b));
        case TKind::Alt: return t_alt(to_flat(p->a), to_flat(p->b));
        case TKind::Sum: return t_sum(p->var, to_flat(p->a));
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test: return p;
        default: throw malformed_input("operator nodes must be eliminated before sign conversion");
    }
}

/// Rewrite flat entries to the signed notation of one unit: influx channels
/// become -a(-t), outflux channels +a(t). A channel that loops back into
/// the same unit is written as outflux.
inline Tuplix to_signed(const UnitIo& g, const Tuplix& p) {
    switch (p->kind) {
        case TKind::Entry: {
            if (p->attr.sign != Sign::Flat)
                throw malformed_input("entry " + p->attr.str() + " is already signed");
            if (g.out.count(p->attr.name))
                return t_entry(Attribute(p->attr.name, Sign::Plus), p->data);
            if (g.in.count(p->attr.name))
                return t_entry(Attribute(p->attr.name, Sign::Minus), dt_neg(p->data));
            throw malformed_input("attribute " + p->attr.str() + " is not a channel of the unit");
        }
        case TKind::Conj: return t_conj(to_signed(g, p->a), to_signed(g, p->b));
        case TKind::Alt: return t_alt(to_signed(g, p->a), to_signed(g, p->b));
        case TKind::Sum: return t_sum(p->var, to_signed(g, p->a));
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test: return p;
        default: throw malformed_input("operator nodes must be eliminated before sign conversion");
    }
}

// ---- visibility annotation ---------------------------------------------------

/// Conjoin a visible signed copy onto every tracked flat entry of one unit:
/// outflux channels get +a(x), influx channels get -a(-x). Signed entries
/// pass through untouched; flat entries on unknown channels are rejected.
inline Tuplix sign_annotate(const UnitIo& g, const std::set<Attribute>& tracked,
                            const Tuplix& p) {
    switch (p->kind) {
        case TKind::Entry: {
            if (p->attr.sign != Sign::Flat) return p;
            bool is_out = g.out.count(p->attr.name) > 0;
            bool is_in = g.in.count(p->attr.name) > 0;
            if (!is_out && !is_in)
                throw malformed_input("attribute " + p->attr.str() +
                                      " is not a channel of the unit");
            if (!tracked.count(p->attr)) return p;
            // A looping channel counts as outflux here, matching to_signed.
            Tuplix copy = is_out ? t_entry(Attribute(p->attr.name, Sign::Plus), p->data)
                                 : t_entry(Attribute(p->attr.name, Sign::Minus), dt_neg(p->data));
            return t_conj(copy, p);
        }
        case TKind::Conj: return t_conj(sign_annotate(g, tracked, p->a), sign_annotate(g, tracked, p->b));
        case TKind::Alt: return t_alt(sign_annotate(g, tracked, p->a), sign_annotate(g, tracked, p->b));
        case TKind::Sum: return t_sum(p->var, sign_annotate(g, tracked, p->a));
        case TKind::Eps:
        case TKind::Delta:
        case TKind::Test: return p;
        default:
            throw malformed_input("operator nodes must be eliminated before sign annotation");
    }
}

// ---- flux constraint ----------------------------------------------------------

namespace fluxdetail {

/// Recursion over the conjunction read as a list: entries accumulate into
/// the running total, tests pass through, choice distributes, binders are
/// renamed off the total and the tail. The exhausted list yields the test
/// that the total vanishes.
inline Tuplix kirch_rec(const DataTerm& total, std::vector<Tuplix> items, size_t i) {
    while (i < items.size() && items[i]->kind == TKind::Conj) {
        Tuplix h = items[i];
        items[i] = h->b;
        items.insert(items.begin() + static_cast<long>(i), h->a);
    }
    if (i == items.size()) return t_test(total);
    const Tuplix h = items[i];
    switch (h->kind) {
        case TKind::Eps: return kirch_rec(total, std::move(items), i + 1);
        case TKind::Delta: return t_delta();
        case TKind::Test: return t_conj(h, kirch_rec(total, std::move(items), i + 1));
        case TKind::Entry: {
            // Signed copies are visibility artifacts; only neutral entries
            // carry flux.
            DataTerm next =
                h->attr.sign == Sign::Flat ? dt_add(total, h->data) : total;
            return t_conj(h, kirch_rec(next, std::move(items), i + 1));
        }
        case TKind::Alt: {
            std::vector<Tuplix> left(items), right(std::move(items));
            left[i] = h->a;
            right[i] = h->b;
            return t_alt(kirch_rec(total, std::move(left), i),
                         kirch_rec(total, std::move(right), i));
        }
        case TKind::Sum: {
            std::set<Name> avoid = vars_of(total);
            for (size_t j = i + 1; j < items.size(); ++j) {
                auto fv = free_vars(items[j]);
                avoid.insert(fv.begin(), fv.end());
            }
            Name x = h->var;
            Tuplix body = h->a;
            if (avoid.count(x)) {
                auto taken = avoid;
                auto bfv = free_vars(body);
                taken.insert(bfv.begin(), bfv.end());
                Name f = fresh_name(x, taken);
                body = subst_tuplix(body, x, dt_var(f));
                x = f;
            }
            items[i] = body;
            return t_sum(x, kirch_rec(total, std::move(items), i));
        }
        default:
            throw malformed_input("operator nodes must be eliminated before the flux constraint");
    }
}

}  // namespace fluxdetail

/// Add to every alternative the test that its entry payloads sum to the
/// negated offset.
inline Tuplix kirchhoff_t(const DataTerm& offset, const Tuplix& p) {
    return fluxdetail::kirch_rec(offset, {p}, 0);
}

/// The plain flux constraint: every alternative's total flow is zero.
/// Signed copies are folded into their neutral form first so that they
/// count.
inline Tuplix kirchhoff(const Tuplix& p) { return kirchhoff_t(dt_int(0), to_flat(p)); }

}  // namespace tuplix
