#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tuplix/data_term.hpp"
#include "tuplix/errors.hpp"
#include "tuplix/poly.hpp"

namespace tuplix::meadow {

/// Three-valued verdict of the decision procedures.
enum class Tri { ProvablyTrue, ProvablyFalse, Unknown };

inline const char* tri_str(Tri t) {
    switch (t) {
        case Tri::ProvablyTrue: return "ProvablyTrue";
        case Tri::ProvablyFalse: return "ProvablyFalse";
        case Tri::Unknown: return "Unknown";
    }
    return "?";
}

struct Limits {
    std::uint64_t branch_budget = std::uint64_t(1) << 16;
    int depth_limit = 64;
};

// ---- term <-> polynomial ------------------------------------------------

inline Poly poly_of_term(const DataTerm& t) {
    switch (t->kind) {
        case DtKind::Const: return poly_const(t->value);
        case DtKind::Var: return poly_var(t->name);
        case DtKind::Neg: return poly_neg(poly_of_term(t->args[0]));
        case DtKind::Add: return poly_add(poly_of_term(t->args[0]), poly_of_term(t->args[1]));
        case DtKind::Mul: return poly_mul(poly_of_term(t->args[0]), poly_of_term(t->args[1]));
        case DtKind::Inv: return poly_inv(poly_of_term(t->args[0]));
        case DtKind::FnApp: {
            std::vector<PolyPtr> args;
            args.reserve(t->args.size());
            for (const auto& a : t->args) args.push_back(std::make_shared<Poly>(poly_of_term(a)));
            return poly_atom(atom_app(t->name, std::move(args)));
        }
        case DtKind::LamApp: return poly_of_term(contract_lambda(*t->fn, t->args));
    }
    throw malformed_input("corrupt data term");
}

inline DataTerm term_of_poly(const Poly& p);

inline DataTerm term_of_atom(const AtomPtr& a) {
    switch (a->kind) {
        case AtomKind::Var: return dt_var(a->name);
        case AtomKind::Inv: return dt_inv(term_of_poly(*a->inv_arg));
        case AtomKind::App: {
            std::vector<DataTerm> args;
            args.reserve(a->args.size());
            for (const auto& q : a->args) args.push_back(term_of_poly(*q));
            return dt_app(a->name, std::move(args));
        }
    }
    throw malformed_input("corrupt atom");
}

inline DataTerm term_of_monomial(const Monomial& m) {
    DataTerm out;
    for (const auto& [a, e] : m) {
        for (int i = 0; i < e; ++i) {
            DataTerm f = term_of_atom(a);
            out = out ? dt_mul(std::move(out), std::move(f)) : std::move(f);
        }
    }
    return out;
}

/// Deterministic reconstruction; re-normalizing the result is the identity.
inline DataTerm term_of_poly(const Poly& p) {
    if (p.terms.empty()) return dt_int(0);
    DataTerm out;
    for (const auto& [m, c] : p.terms) {
        DataTerm piece;
        if (m.empty()) {
            piece = dt_const(c);
        } else if (c == 1) {
            piece = term_of_monomial(m);
        } else if (c == -1) {
            piece = dt_neg(term_of_monomial(m));
        } else if (c > 0) {
            piece = dt_mul(dt_const(c), term_of_monomial(m));
        } else {
            piece = dt_neg(dt_mul(dt_const(-c), term_of_monomial(m)));
        }
        out = out ? dt_add(std::move(out), std::move(piece)) : std::move(piece);
    }
    return out;
}

/// Canonical form: ordered sparse polynomial over variables, opaque
/// function applications and inverse atoms, rebuilt as a term.
inline DataTerm normalize_data(const DataTerm& t) { return term_of_poly(poly_of_term(t)); }

// ---- zero decision -------------------------------------------------------
//
// Case split on the zero-ness of each inverse-atom argument u. Where u = 0
// the atom collapses to 0 and the constraint is consumed by constant-
// coefficient linear solving when possible (kept and used through exact
// division otherwise). Where u != 0 the atom w = u^-1 satisfies u*w = 1, so
// multiplying through by u^deg eliminates w, including occurrences nested
// inside other inverse arguments. Each leaf is a plain polynomial question
// over a characteristic-zero field: zero iff identically zero; never zero
// iff a nonzero constant times assumed-nonzero factors.

namespace detail {

enum class Fate { AllZero, NeverZero, Mixed, Vacuous };

struct BranchState {
    std::vector<Poly> nonzeros;  // assumed nonzero on this branch
    std::vector<Poly> zeros;     // assumed zero, not yet consumed
};

inline Fate combine(Fate a, Fate b) {
    if (a == Fate::Vacuous) return b;
    if (b == Fate::Vacuous) return a;
    if (a == b) return a;
    return Fate::Mixed;
}

/// Linear solve with a constant coefficient: z = c*x + rest with c a nonzero
/// rational and x absent from rest. Returns (x, -rest/c).
inline std::optional<std::pair<Name, Poly>> solve_const_linear(const Poly& z) {
    std::vector<Name> candidates;
    for (const auto& [m, c] : z.terms)
        if (m.size() == 1 && m[0].second == 1 && m[0].first->kind == AtomKind::Var)
            candidates.push_back(m[0].first->name);
    std::sort(candidates.begin(), candidates.end());
    // Prefer the greatest variable; deterministic and matches the rewrite
    // direction used elsewhere.
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        const Name& x = *it;
        Rational c;
        Poly rest;
        bool bad = false;
        for (const auto& [m, k] : z.terms) {
            if (m.size() == 1 && m[0].second == 1 && m[0].first->kind == AtomKind::Var &&
                m[0].first->name == x) {
                c = k;
            } else {
                if (poly_vars(poly_mono(m, k)).count(x)) {
                    bad = true;
                    break;
                }
                rest = poly_add(rest, poly_mono(m, k));
            }
        }
        if (bad || c.is_zero()) continue;
        return std::make_pair(x, poly_scale(rest, Rational(-1) / c));
    }
    return std::nullopt;
}

/// Value-preserving removal of the atom `w` (argument `u`, assumed nonzero)
/// from inside nested inverse arguments: q^-1 with q = sum_j c_j w^j turns
/// into u^m * (sum_j c_j u^(m-j))^-1.
inline Poly elim_nested(const Poly& p, const AtomPtr& w, const Poly& u);

inline Poly elim_atom(const AtomPtr& a, const AtomPtr& w, const Poly& u) {
    if (a->key == w->key) return poly_atom(a);  // top-level powers handled by caller
    switch (a->kind) {
        case AtomKind::Var: return poly_atom(a);
        case AtomKind::Inv: {
            Poly q = elim_nested(*a->inv_arg, w, u);
            int m = degree_in(q, w);
            if (m == 0) return poly_inv(q);
            auto cs = coeffs_in(q, w);
            Poly hat;
            for (int j = 0; j <= m; ++j) hat = poly_add(hat, poly_mul(cs[j], poly_pow(u, m - j)));
            return poly_mul(poly_pow(u, m), poly_inv(hat));
        }
        case AtomKind::App: {
            std::vector<PolyPtr> args;
            args.reserve(a->args.size());
            bool changed = false;
            for (const auto& q : a->args) {
                Poly r = elim_nested(*q, w, u);
                changed = changed || !poly_equal(r, *q);
                args.push_back(std::make_shared<Poly>(std::move(r)));
            }
            return poly_atom(changed ? atom_app(a->name, std::move(args)) : a);
        }
    }
    return poly_zero();
}

inline Poly elim_nested(const Poly& p, const AtomPtr& w, const Poly& u) {
    Poly out;
    for (const auto& [m, c] : p.terms) {
        Poly t = poly_const(c);
        for (const auto& [a, e] : m) t = poly_mul(t, poly_pow(elim_atom(a, w, u), e));
        out = poly_add(out, t);
    }
    return out;
}

/// Remove every power of `w` given u != 0: nested rewrite, then multiply
/// through by u^deg and contract u*w to 1. Zero-equivalent on the branch.
inline Poly eliminate_nonzero_inverse(const Poly& p, const AtomPtr& w, const Poly& u) {
    Poly q = elim_nested(p, w, u);
    int k = degree_in(q, w);
    if (k == 0) return q;
    auto cs = coeffs_in(q, w);
    Poly out;
    for (int j = 0; j <= k; ++j) out = poly_add(out, poly_mul(cs[j], poly_pow(u, k - j)));
    return out;
}

inline Fate decide(Poly p, BranchState br, std::uint64_t& budget, int depth, int depth_limit);

/// Constraint saturation. Returns false when the branch is unsatisfiable.
inline bool saturate(Poly& p, BranchState& br) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < br.nonzeros.size(); ++i) {
            if (br.nonzeros[i].is_zero()) return false;  // 0 != 0 impossible
            if (br.nonzeros[i].is_const()) {
                br.nonzeros.erase(br.nonzeros.begin() + i--);
                continue;
            }
        }
        for (size_t i = 0; i < br.zeros.size(); ++i) {
            Poly z = br.zeros[i];
            // Strip factors known nonzero.
            bool stripped = true;
            while (stripped && !z.is_zero()) {
                stripped = false;
                for (const auto& nz : br.nonzeros) {
                    if (auto q = divide_exact(z, nz)) {
                        z = *q;
                        stripped = true;
                        break;
                    }
                }
            }
            if (z.is_zero()) {
                br.zeros.erase(br.zeros.begin() + i--);
                progress = true;
                continue;
            }
            if (z.is_const()) return false;  // nonzero constant = 0 impossible
            if (auto sol = solve_const_linear(z)) {
                const auto& [x, s] = *sol;
                br.zeros.erase(br.zeros.begin() + i);
                p = subst_var(p, x, s);
                for (auto& c : br.zeros) c = subst_var(c, x, s);
                for (auto& c : br.nonzeros) c = subst_var(c, x, s);
                progress = true;
                break;
            }
            br.zeros[i] = std::move(z);
        }
    }
    return true;
}

inline Fate decide(Poly p, BranchState br, std::uint64_t& budget, int depth, int depth_limit) {
    if (budget == 0) throw resource_limit("zero-decision case-split budget exhausted");
    --budget;
    if (depth > depth_limit) throw resource_limit("zero-decision depth limit exceeded");

    if (!saturate(p, br)) return Fate::Vacuous;
    if (p.is_zero()) return Fate::AllZero;

    // A factor assumed zero forces the product to zero on this branch.
    for (const auto& z : br.zeros)
        if (divide_exact(p, z)) return Fate::AllZero;

    // Strip factors assumed nonzero; zero-equivalent on this branch.
    {
        bool stripped = true;
        while (stripped && !p.is_const()) {
            stripped = false;
            for (const auto& nz : br.nonzeros) {
                if (auto q = divide_exact(p, nz)) {
                    p = *q;
                    stripped = true;
                    break;
                }
            }
        }
    }
    if (p.is_zero()) return Fate::AllZero;

    // Inverse atoms hiding in the constraints can make the whole branch
    // unsatisfiable (an indicator pinned to -1, say), so they must be split
    // before any verdict about p is allowed to stand.
    auto atoms = top_inv_atoms(p);
    if (atoms.empty()) {
        for (const auto& z : br.zeros) {
            auto za = top_inv_atoms(z);
            atoms.insert(za.begin(), za.end());
        }
        for (const auto& nz : br.nonzeros) {
            auto na = top_inv_atoms(nz);
            atoms.insert(na.begin(), na.end());
        }
    }
    if (atoms.empty()) {
        if (p.is_const()) return Fate::NeverZero;
        for (const auto& z : br.zeros)
            if (divide_exact(p, z)) return Fate::AllZero;
        // Nonconstant polynomial over a characteristic-zero field: takes the
        // value zero somewhere and a nonzero value somewhere.
        return Fate::Mixed;
    }

    AtomPtr w = atoms.begin()->second;
    Poly u = *w->inv_arg;

    // Branch u = 0: the inverse collapses to 0.
    BranchState bz = br;
    Poly pz = subst_inv_atom(p, w->key, poly_zero());
    for (auto& c : bz.zeros) c = subst_inv_atom(c, w->key, poly_zero());
    for (auto& c : bz.nonzeros) c = subst_inv_atom(c, w->key, poly_zero());
    bz.zeros.push_back(u);
    Fate f0 = decide(std::move(pz), std::move(bz), budget, depth + 1, depth_limit);

    // Branch u != 0: u * w = 1 eliminates w.
    BranchState bn = br;
    Poly pn = eliminate_nonzero_inverse(p, w, u);
    for (auto& c : bn.zeros) c = eliminate_nonzero_inverse(c, w, u);
    for (auto& c : bn.nonzeros) c = eliminate_nonzero_inverse(c, w, u);
    bn.nonzeros.push_back(u);
    Fate f1 = decide(std::move(pn), std::move(bn), budget, depth + 1, depth_limit);

    return combine(f0, f1);
}

}  // namespace detail

/// Is the polynomial zero under every assignment in every zero-totalized
/// field of characteristic zero? ProvablyFalse means nonzero under every
/// assignment. Throws resource_limit when the branch budget runs out.
inline Tri poly_is_zero(const Poly& p, const Limits& lim = {}) {
    std::uint64_t budget = lim.branch_budget;
    detail::Fate f = detail::decide(p, {}, budget, 0, lim.depth_limit);
    switch (f) {
        case detail::Fate::AllZero: return Tri::ProvablyTrue;
        case detail::Fate::NeverZero: return Tri::ProvablyFalse;
        default: return Tri::Unknown;
    }
}

inline Tri is_zero(const DataTerm& t, const Limits& lim = {}) {
    return poly_is_zero(poly_of_term(t), lim);
}

// ---- equality --------------------------------------------------------

struct EqOptions {
    std::uint64_t seed = 0xCAFE;
    int samples = 64;
    Limits limits;
};

/// Deterministic sample stream of small rationals (numerator and
/// denominator within +/-100, denominator nonzero).
inline Rational random_rational(std::mt19937_64& rng) {
    auto draw = [&rng]() { return static_cast<long long>(rng() % 201) - 100; };
    long long num = draw();
    long long den = draw();
    while (den == 0) den = draw();
    return Rational(num) / Rational(den);
}

/// Equality of data terms as functions. ProvablyFalse is existential: some
/// assignment separates the two sides (either a random sample or every
/// point of an exhaustive case split).
inline Tri eq_data(const DataTerm& a, const DataTerm& b, const EqOptions& opts = {}) {
    if (!mentions_fn_app(a) && !mentions_fn_app(b)) {
        std::set<Name> vars = vars_of(a);
        auto vb = vars_of(b);
        vars.insert(vb.begin(), vb.end());
        std::mt19937_64 rng(opts.seed);
        for (int i = 0; i < opts.samples; ++i) {
            Assignment env;
            for (const auto& v : vars) env[v] = random_rational(rng);
            if (eval_data(a, env) != eval_data(b, env)) return Tri::ProvablyFalse;
        }
    }
    try {
        return poly_is_zero(poly_sub(poly_of_term(a), poly_of_term(b)), opts.limits);
    } catch (const resource_limit&) {
        return Tri::Unknown;
    }
}

/// Do two polynomials vanish on exactly the same assignments? Decided via
/// their 0/1-valued indicator difference; no sampling, so independent free
/// variables come out Unknown rather than refuted.
inline Tri same_zero_set(const Poly& a, const Poly& b, const Limits& lim = {}) {
    if (poly_equal(a, b)) return Tri::ProvablyTrue;
    Poly ia = poly_mul(a, poly_inv(a));
    Poly ib = poly_mul(b, poly_inv(b));
    try {
        return poly_is_zero(poly_sub(ia, ib), lim);
    } catch (const resource_limit&) {
        return Tri::Unknown;
    }
}

// ---- linear solving -----------------------------------------------------

/// Write p as c*x + rest with x absent from c and rest (including inside
/// inverse and application arguments) and c provably nonzero; the solution
/// is -rest/c. Nonlinear or doubtful coefficients yield nullopt.
inline std::optional<Poly> solve_linear_poly(const Poly& p, const Name& x, const Limits& lim = {}) {
    Poly coeff, rest;
    for (const auto& [m, c] : p.terms) {
        int xe = 0;
        Monomial stripped;
        for (const auto& [a, e] : m) {
            if (a->kind == AtomKind::Var && a->name == x) {
                xe = e;
            } else {
                stripped.push_back({a, e});
            }
        }
        if (xe == 0) {
            rest = poly_add(rest, poly_mono(m, c));
        } else if (xe == 1) {
            coeff = poly_add(coeff, poly_mono(std::move(stripped), c));
        } else {
            return std::nullopt;  // nonlinear in x
        }
    }
    if (coeff.is_zero()) return std::nullopt;
    if (poly_vars(coeff).count(x) || poly_vars(rest).count(x)) return std::nullopt;
    try {
        if (poly_is_zero(coeff, lim) != Tri::ProvablyFalse) return std::nullopt;
    } catch (const resource_limit&) {
        return std::nullopt;
    }
    return poly_mul(poly_neg(rest), poly_inv(coeff));
}

inline std::optional<DataTerm> solve_linear(const DataTerm& t, const Name& x, const Limits& lim = {}) {
    auto p = solve_linear_poly(poly_of_term(t), x, lim);
    if (!p) return std::nullopt;
    return term_of_poly(*p);
}

}  // namespace tuplix::meadow
