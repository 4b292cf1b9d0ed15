#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tuplix/data_term.hpp"
#include "tuplix/errors.hpp"
#include "tuplix/name.hpp"
#include "tuplix/rational.hpp"

namespace tuplix::meadow {

// Canonical form of a data term: a sparse multivariate polynomial whose
// indeterminates are variables, opaque function applications, and inverses
// of canonical non-constant polynomials. Constant inverses fold; inverses
// of products split; double inverses cancel. Equal polynomials are
// structurally identical, so structural comparison decides this fragment.

struct Poly;
using PolyPtr = std::shared_ptr<const Poly>;

enum class AtomKind { Var, Inv, App };

struct Atom {
    AtomKind kind;
    Name name;                  // Var, App
    PolyPtr inv_arg;            // Inv
    std::vector<PolyPtr> args;  // App
    std::string key;            // canonical serialization; total order
};
using AtomPtr = std::shared_ptr<const Atom>;

/// Product of atoms with positive exponents, sorted ascending by key.
using Monomial = std::vector<std::pair<AtomPtr, int>>;

struct Poly {
    /// Terms sorted descending by monomial order; coefficients nonzero.
    std::vector<std::pair<Monomial, Rational>> terms;

    bool is_zero() const { return terms.empty(); }
    bool is_const() const {
        return terms.empty() || (terms.size() == 1 && terms[0].first.empty());
    }
    Rational const_value() const {
        return terms.empty() ? Rational(0) : terms[0].second;
    }
};

// ---- ordering ----------------------------------------------------------

inline int total_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [a, e] : m) d += e;
    return d;
}

/// Graded lexicographic order with lower atom keys taking precedence, so
/// x^2 > x*y > y^2 and terms print in the familiar x-before-y direction.
inline int mono_cmp(const Monomial& a, const Monomial& b) {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first->key != ib->first->key)
            return ia->first->key < ib->first->key ? 1 : -1;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
        ++ia;
        ++ib;
    }
    if (ia != a.end()) return 1;
    if (ib != b.end()) return -1;
    return 0;
}

inline bool mono_equal(const Monomial& a, const Monomial& b) { return mono_cmp(a, b) == 0; }

// ---- serialization -----------------------------------------------------

inline std::string serialize(const Poly& p);

inline std::string mono_serial(const Monomial& m) {
    std::string s;
    for (const auto& [a, e] : m) {
        s += '{' + a->key + '}';
        if (e != 1) s += '^' + std::to_string(e);
    }
    return s;
}

inline std::string serialize(const Poly& p) {
    if (p.terms.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < p.terms.size(); ++i) {
        if (i) s += '+';
        s += rational_str(p.terms[i].second);
        s += mono_serial(p.terms[i].first);
    }
    return s;
}

// ---- atom constructors -------------------------------------------------

inline AtomPtr atom_var(const Name& x) {
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Var;
    a->name = x;
    a->key = "v:" + x.str();
    return a;
}

inline AtomPtr atom_inv(PolyPtr arg) {
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Inv;
    a->key = "i:(" + serialize(*arg) + ")";
    a->inv_arg = std::move(arg);
    return a;
}

inline AtomPtr atom_app(const Name& f, std::vector<PolyPtr> args) {
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::App;
    a->name = f;
    a->key = "f:" + f.str() + "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) a->key += ',';
        a->key += serialize(*args[i]);
    }
    a->key += ')';
    a->args = std::move(args);
    return a;
}

// ---- basic constructors and ring operations ----------------------------

inline Poly poly_zero() { return {}; }

inline Poly poly_const(Rational c) {
    Poly p;
    if (!c.is_zero()) p.terms.push_back({Monomial{}, std::move(c)});
    return p;
}

inline Poly poly_one() { return poly_const(Rational(1)); }

inline Poly poly_mono(Monomial m, Rational c) {
    Poly p;
    if (!c.is_zero()) p.terms.push_back({std::move(m), std::move(c)});
    return p;
}

inline Poly poly_atom(const AtomPtr& a) { return poly_mono(Monomial{{a, 1}}, Rational(1)); }

inline Poly poly_var(const Name& x) { return poly_atom(atom_var(x)); }

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly out;
    out.terms.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() && j < b.terms.size()) {
        int c = mono_cmp(a.terms[i].first, b.terms[j].first);
        if (c > 0) {
            out.terms.push_back(a.terms[i++]);
        } else if (c < 0) {
            out.terms.push_back(b.terms[j++]);
        } else {
            Rational s = a.terms[i].second + b.terms[j].second;
            if (!s.is_zero()) out.terms.push_back({a.terms[i].first, std::move(s)});
            ++i;
            ++j;
        }
    }
    while (i < a.terms.size()) out.terms.push_back(a.terms[i++]);
    while (j < b.terms.size()) out.terms.push_back(b.terms[j++]);
    return out;
}

inline Poly poly_neg(const Poly& a) {
    Poly out = a;
    for (auto& t : out.terms) t.second = -t.second;
    return out;
}

inline Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

inline Poly poly_scale(const Poly& a, const Rational& c) {
    if (c.is_zero()) return poly_zero();
    Poly out = a;
    for (auto& t : out.terms) t.second *= c;
    return out;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first->key < b[j].first->key) {
            out.push_back(a[i++]);
        } else if (b[j].first->key < a[i].first->key) {
            out.push_back(b[j++]);
        } else {
            out.push_back({a[i].first, a[i].second + b[j].second});
            ++i;
            ++j;
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return out;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms) {
        Poly row;
        row.terms.reserve(b.terms.size());
        for (const auto& [mb, cb] : b.terms) row.terms.push_back({mono_mul(ma, mb), ca * cb});
        // b's terms stay sorted under multiplication by a fixed monomial.
        out = poly_add(out, row);
    }
    return out;
}

inline Poly poly_pow(const Poly& a, int k) {
    Poly out = poly_one();
    for (int i = 0; i < k; ++i) out = poly_mul(out, a);
    return out;
}

// ---- inverse normalization ----------------------------------------------

inline Poly poly_inv(const Poly& p);

/// Inverse of a single monomial: distribute over the factors; a variable or
/// application inverts to an opaque atom, an inverse atom cancels back to
/// its argument.
inline Poly inv_monomial(const Monomial& m) {
    Poly out = poly_one();
    for (const auto& [a, e] : m) {
        Poly factor;
        switch (a->kind) {
            case AtomKind::Var:
            case AtomKind::App: {
                auto arg = std::make_shared<Poly>(poly_atom(a));
                factor = poly_atom(atom_inv(std::move(arg)));
                break;
            }
            case AtomKind::Inv: factor = *a->inv_arg; break;
        }
        out = poly_mul(out, poly_pow(factor, e));
    }
    return out;
}

/// Common monomial divisor of all terms.
inline Monomial mono_gcd_of(const Poly& p) {
    Monomial g = p.terms[0].first;
    for (size_t i = 1; i < p.terms.size() && !g.empty(); ++i) {
        const Monomial& m = p.terms[i].first;
        Monomial next;
        size_t a = 0, b = 0;
        while (a < g.size() && b < m.size()) {
            if (g[a].first->key < m[b].first->key) {
                ++a;
            } else if (m[b].first->key < g[a].first->key) {
                ++b;
            } else {
                next.push_back({g[a].first, std::min(g[a].second, m[b].second)});
                ++a;
                ++b;
            }
        }
        g = std::move(next);
    }
    return g;
}

inline bool mono_divides(const Monomial& d, const Monomial& m) {
    size_t i = 0;
    for (const auto& [a, e] : d) {
        while (i < m.size() && m[i].first->key < a->key) ++i;
        if (i == m.size() || !(m[i].first->key == a->key) || m[i].second < e) return false;
    }
    return true;
}

inline Monomial mono_div(const Monomial& m, const Monomial& d) {
    Monomial out;
    size_t i = 0;
    for (const auto& [a, e] : m) {
        int drop = 0;
        while (i < d.size() && d[i].first->key < a->key) ++i;
        if (i < d.size() && d[i].first->key == a->key) drop = d[i].second;
        if (e - drop > 0) out.push_back({a, e - drop});
    }
    return out;
}

/// Totalized inverse on canonical polynomials. Constants fold (with 0^-1 = 0);
/// a common scalar and monomial factor is pulled out so the residual inverse
/// atom argument is monic, multi-term and monomial-free, which makes atoms
/// canonical: the inverse laws for products, negation and double inverses
/// hold by construction.
inline Poly poly_inv(const Poly& p) {
    if (p.is_zero()) return poly_zero();
    if (p.is_const()) return poly_const(total_inverse(p.const_value()));
    Monomial g = mono_gcd_of(p);
    Poly r;
    r.terms.reserve(p.terms.size());
    for (const auto& [m, c] : p.terms) r.terms.push_back({mono_div(m, g), c});
    if (r.terms.size() == 1) {
        // p = c * g with c the residual constant.
        const Rational& c = r.terms[0].second;
        return poly_scale(inv_monomial(g), total_inverse(c));
    }
    Rational lc = r.terms[0].second;
    Poly q = poly_scale(r, Rational(1) / lc);
    auto atom = atom_inv(std::make_shared<Poly>(std::move(q)));
    return poly_scale(poly_mul(inv_monomial(g), poly_atom(atom)), Rational(1) / lc);
}

// ---- structure queries ---------------------------------------------------

inline bool poly_equal(const Poly& a, const Poly& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        if (a.terms[i].second != b.terms[i].second) return false;
        if (!mono_equal(a.terms[i].first, b.terms[i].first)) return false;
    }
    return true;
}

inline void collect_poly_vars(const Poly& p, std::set<Name>& out) {
    for (const auto& [m, c] : p.terms) {
        for (const auto& [a, e] : m) {
            switch (a->kind) {
                case AtomKind::Var: out.insert(a->name); break;
                case AtomKind::Inv: collect_poly_vars(*a->inv_arg, out); break;
                case AtomKind::App:
                    for (const auto& q : a->args) collect_poly_vars(*q, out);
                    break;
            }
        }
    }
}

/// Variables anywhere in the polynomial, including nested inside inverse
/// and application atoms.
inline std::set<Name> poly_vars(const Poly& p) {
    std::set<Name> s;
    collect_poly_vars(p, s);
    return s;
}

/// Inverse atoms occurring at the top level (not nested inside another
/// atom's argument), keyed canonically.
inline std::map<std::string, AtomPtr> top_inv_atoms(const Poly& p) {
    std::map<std::string, AtomPtr> out;
    for (const auto& [m, c] : p.terms)
        for (const auto& [a, e] : m)
            if (a->kind == AtomKind::Inv) out.emplace(a->key, a);
    return out;
}

inline int degree_in(const Poly& p, const AtomPtr& w) {
    int d = 0;
    for (const auto& [m, c] : p.terms)
        for (const auto& [a, e] : m)
            if (a->key == w->key) d = std::max(d, e);
    return d;
}

/// Coefficients of powers of `w`: result[j] collects the monomials carrying
/// w^j, with w stripped.
inline std::vector<Poly> coeffs_in(const Poly& p, const AtomPtr& w) {
    std::vector<Poly> out(static_cast<size_t>(degree_in(p, w)) + 1);
    for (const auto& [m, c] : p.terms) {
        int j = 0;
        Monomial rest;
        for (const auto& [a, e] : m) {
            if (a->key == w->key) {
                j = e;
            } else {
                rest.push_back({a, e});
            }
        }
        out[j] = poly_add(out[j], poly_mono(std::move(rest), c));
    }
    return out;
}

// ---- substitution -----------------------------------------------------

inline Poly subst_var(const Poly& p, const Name& x, const Poly& s);

inline Poly atom_after_subst(const AtomPtr& a, const Name& x, const Poly& s) {
    switch (a->kind) {
        case AtomKind::Var: return a->name == x ? s : poly_atom(a);
        case AtomKind::Inv: return poly_inv(subst_var(*a->inv_arg, x, s));
        case AtomKind::App: {
            std::vector<PolyPtr> args;
            args.reserve(a->args.size());
            bool changed = false;
            for (const auto& q : a->args) {
                Poly r = subst_var(*q, x, s);
                changed = changed || !poly_equal(r, *q);
                args.push_back(std::make_shared<Poly>(std::move(r)));
            }
            return poly_atom(changed ? atom_app(a->name, std::move(args)) : a);
        }
    }
    return poly_zero();
}

/// Substitute a polynomial for a variable, renormalizing as atoms fold.
inline Poly subst_var(const Poly& p, const Name& x, const Poly& s) {
    Poly out;
    for (const auto& [m, c] : p.terms) {
        Poly t = poly_const(c);
        for (const auto& [a, e] : m) t = poly_mul(t, poly_pow(atom_after_subst(a, x, s), e));
        out = poly_add(out, t);
    }
    return out;
}

/// Replace an inverse atom (matched by key, including occurrences nested
/// inside other atoms) by a replacement polynomial.
inline Poly subst_inv_atom(const Poly& p, const std::string& key, const Poly& repl);

inline Poly atom_after_inv_subst(const AtomPtr& a, const std::string& key, const Poly& repl) {
    if (a->key == key) return repl;
    switch (a->kind) {
        case AtomKind::Var: return poly_atom(a);
        case AtomKind::Inv: return poly_inv(subst_inv_atom(*a->inv_arg, key, repl));
        case AtomKind::App: {
            std::vector<PolyPtr> args;
            args.reserve(a->args.size());
            bool changed = false;
            for (const auto& q : a->args) {
                Poly r = subst_inv_atom(*q, key, repl);
                changed = changed || !poly_equal(r, *q);
                args.push_back(std::make_shared<Poly>(std::move(r)));
            }
            return poly_atom(changed ? atom_app(a->name, std::move(args)) : a);
        }
    }
    return poly_zero();
}

inline Poly subst_inv_atom(const Poly& p, const std::string& key, const Poly& repl) {
    Poly out;
    for (const auto& [m, c] : p.terms) {
        Poly t = poly_const(c);
        for (const auto& [a, e] : m) t = poly_mul(t, poly_pow(atom_after_inv_subst(a, key, repl), e));
        out = poly_add(out, t);
    }
    return out;
}

// ---- exact division -----------------------------------------------------

/// Exact multivariate division; nullopt unless d divides p in the
/// polynomial ring over the atoms.
inline std::optional<Poly> divide_exact(const Poly& p, const Poly& d) {
    if (d.is_zero()) return std::nullopt;
    Poly r = p;
    Poly q;
    while (!r.is_zero()) {
        const auto& [lm_r, lc_r] = r.terms[0];
        const auto& [lm_d, lc_d] = d.terms[0];
        if (!mono_divides(lm_d, lm_r)) return std::nullopt;
        Poly t = poly_mono(mono_div(lm_r, lm_d), lc_r / lc_d);
        q = poly_add(q, t);
        r = poly_sub(r, poly_mul(t, d));
    }
    return q;
}

}  // namespace tuplix::meadow
