#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tuplix/meadow.hpp"
#include "tuplix/term.hpp"

namespace tuplix {

using meadow::Limits;
using meadow::Poly;
using meadow::Tri;

/// One alternative of a normalized tuplix: a binder prefix, a conjunction of
/// zero tests (every polynomial must vanish), and per-attribute payloads.
struct Alternative {
    std::vector<Name> binders;  // outermost first
    std::vector<Poly> tests;
    std::map<Attribute, Poly> entries;
};

/// A normalized tuplix as a set of alternatives; no alternatives = null.
struct BasicForm {
    std::vector<Alternative> alts;
};

// ---- small helpers --------------------------------------------------------

inline std::set<Name> alt_vars(const Alternative& alt) {
    std::set<Name> out;
    for (const auto& t : alt.tests) meadow::collect_poly_vars(t, out);
    for (const auto& [a, q] : alt.entries) meadow::collect_poly_vars(q, out);
    return out;
}

inline std::set<Name> alt_free_vars(const Alternative& alt) {
    std::set<Name> out = alt_vars(alt);
    for (const auto& b : alt.binders) out.erase(b);
    return out;
}

// from/to by value: callers pass names living inside alt itself.
inline Alternative rename_binder(Alternative alt, const Name from, const Name to) {
    Poly tv = meadow::poly_var(to);
    for (auto& b : alt.binders)
        if (b == from) b = to;
    for (auto& t : alt.tests) t = meadow::subst_var(t, from, tv);
    for (auto& [a, q] : alt.entries) q = meadow::subst_var(q, from, tv);
    return alt;
}

inline std::string alt_serial(const Alternative& alt) {
    std::string s = "b:";
    for (const auto& b : alt.binders) s += b.str() + ",";
    s += ";t:";
    for (const auto& t : alt.tests) s += meadow::serialize(t) + ",";
    s += ";e:";
    for (const auto& [a, q] : alt.entries) s += a.str() + "=" + meadow::serialize(q) + ",";
    return s;
}

// ---- conversion to alternatives --------------------------------------------

/// Conjoin two alternatives: disjoint binder prefixes (renaming to prevent
/// capture), concatenated tests, and per-attribute payload sums.
inline Alternative merge_alts(Alternative x, Alternative y) {
    std::set<Name> free_x = alt_free_vars(x), free_y = alt_free_vars(y);
    std::set<Name> taken = alt_vars(x);
    {
        auto vy = alt_vars(y);
        taken.insert(vy.begin(), vy.end());
        taken.insert(x.binders.begin(), x.binders.end());
        taken.insert(y.binders.begin(), y.binders.end());
    }
    for (const Name& b : std::vector<Name>(x.binders)) {
        if (free_y.count(b)) {
            Name f = fresh_name(b, taken);
            taken.insert(f);
            x = rename_binder(std::move(x), b, f);
        }
    }
    for (const Name& b : std::vector<Name>(y.binders)) {
        bool clash = free_x.count(b) > 0;
        for (const auto& xb : x.binders) clash = clash || xb == b;
        if (clash) {
            Name f = fresh_name(b, taken);
            taken.insert(f);
            y = rename_binder(std::move(y), b, f);
        }
    }
    Alternative out = std::move(x);
    out.binders.insert(out.binders.end(), y.binders.begin(), y.binders.end());
    out.tests.insert(out.tests.end(), y.tests.begin(), y.tests.end());
    for (auto& [a, q] : y.entries) {
        auto it = out.entries.find(a);
        if (it == out.entries.end())
            out.entries.emplace(a, std::move(q));
        else
            it->second = meadow::poly_add(it->second, q);
    }
    return out;
}

/// Structural reading of a plain term (no operator nodes) as alternatives.
inline BasicForm to_basic(const Tuplix& p) {
    switch (p->kind) {
        case TKind::Eps: return {{Alternative{}}};
        case TKind::Delta: return {};
        case TKind::Test: {
            Alternative alt;
            alt.tests.push_back(meadow::poly_of_term(p->data));
            return {{std::move(alt)}};
        }
        case TKind::Entry: {
            Alternative alt;
            alt.entries.emplace(p->attr, meadow::poly_of_term(p->data));
            return {{std::move(alt)}};
        }
        case TKind::Alt: {
            BasicForm l = to_basic(p->a), r = to_basic(p->b);
            l.alts.insert(l.alts.end(), std::make_move_iterator(r.alts.begin()),
                          std::make_move_iterator(r.alts.end()));
            return l;
        }
        case TKind::Conj: {
            BasicForm l = to_basic(p->a), r = to_basic(p->b);
            BasicForm out;
            for (const auto& x : l.alts)
                for (const auto& y : r.alts) out.alts.push_back(merge_alts(x, y));
            return out;
        }
        case TKind::Sum: {
            BasicForm bf = to_basic(p->a);
            for (auto& alt : bf.alts)
                if (alt_free_vars(alt).count(p->var))
                    alt.binders.insert(alt.binders.begin(), p->var);
            return bf;
        }
        case TKind::Gamma:
        case TKind::SumFn:
            throw malformed_input("function variable " + p->var.str() +
                                  " survives definition elimination");
        default:
            throw malformed_input("operator nodes must be eliminated before plain rewriting");
    }
}

// ---- canonicalization -------------------------------------------------------

struct CanonOpts {
    bool eliminate_binders = false;  // summation laws on top of the plain ones
    Limits limits;
};

namespace bfdetail {

/// Is p exactly the sum of u * u^-1 over its top inverse atoms? These are
/// the 0/1-valued conjunction indicators; splitting them recovers the
/// individual tests.
inline std::optional<std::vector<Poly>> indicator_split(const Poly& p) {
    auto atoms = meadow::top_inv_atoms(p);
    if (atoms.empty()) return std::nullopt;
    Poly q = p;
    std::vector<Poly> parts;
    for (const auto& [key, w] : atoms) {
        q = meadow::poly_sub(q, meadow::poly_mul(*w->inv_arg, meadow::poly_atom(w)));
        parts.push_back(*w->inv_arg);
    }
    if (!q.is_zero()) return std::nullopt;
    return parts;
}

/// A single-monomial test vanishes iff one of its factors does: drop the
/// coefficient and exponents, and open up inverse factors (u^-1 = 0 iff
/// u = 0).
inline Poly flatten_monomial_test(const Poly& p) {
    const auto& [m, c] = p.terms[0];
    Poly prod = meadow::poly_one();
    for (const auto& [a, e] : m) {
        Poly f = a->kind == meadow::AtomKind::Inv ? *a->inv_arg : meadow::poly_atom(a);
        prod = meadow::poly_mul(prod, f);
    }
    return prod;
}

/// Normalize the test set of one alternative. Returns false when the
/// alternative is contradictory (nullified).
inline bool normalize_tests(std::vector<Poly>& tests, const Limits& lim) {
    std::vector<Poly> work = std::move(tests), done;
    std::set<std::string> seen;
    tests.clear();
    while (!work.empty()) {
        Poly p = std::move(work.front());
        work.erase(work.begin());
        if (p.is_zero()) continue;
        if (p.is_const()) return false;
        if (auto parts = indicator_split(p)) {
            for (auto& q : *parts) work.push_back(std::move(q));
            continue;
        }
        if (p.terms.size() == 1) {
            Poly flat = flatten_monomial_test(p);
            if (!meadow::poly_equal(flat, p)) {
                work.push_back(std::move(flat));
                continue;
            }
        } else if (p.terms[0].second != 1) {
            p = meadow::poly_scale(p, Rational(1) / p.terms[0].second);
        }
        try {
            Tri z = meadow::poly_is_zero(p, lim);
            if (z == Tri::ProvablyTrue) continue;
            if (z == Tri::ProvablyFalse) return false;
        } catch (const resource_limit&) {
            // keep the test undecided
        }
        if (seen.insert(meadow::serialize(p)).second) done.push_back(std::move(p));
    }
    tests = std::move(done);
    return true;
}

/// The summation pattern for "some value differs": 1 - u*u^-1, up to sign,
/// with u linear in the binder. Such a test is satisfiable for all but one
/// binder value.
inline bool is_nonzero_indicator_of(const Poly& p, const Name& binder, const Limits& lim) {
    for (const Poly& q : {meadow::poly_sub(meadow::poly_one(), p),
                          meadow::poly_add(meadow::poly_one(), p)}) {
        auto atoms = meadow::top_inv_atoms(q);
        if (atoms.size() != 1) continue;
        const auto& w = atoms.begin()->second;
        if (!meadow::poly_equal(q, meadow::poly_mul(*w->inv_arg, meadow::poly_atom(w)))) continue;
        if (meadow::solve_linear_poly(*w->inv_arg, binder, lim)) return true;
    }
    return false;
}

inline void subst_everywhere(Alternative& alt, const Name& x, const Poly& sol,
                             size_t keep_test) {
    for (size_t i = 0; i < alt.tests.size(); ++i)
        if (i != keep_test) alt.tests[i] = meadow::subst_var(alt.tests[i], x, sol);
    for (auto& [a, q] : alt.entries) q = meadow::subst_var(q, x, sol);
}

/// Full per-alternative normalization; nullopt when the alternative
/// nullifies.
inline std::optional<Alternative> canon_alt(Alternative alt, const CanonOpts& opt) {
    bool changed = true;
    for (int rounds = 0; changed && rounds < 100; ++rounds) {
        changed = false;
        if (!normalize_tests(alt.tests, opt.limits)) return std::nullopt;

        if (opt.eliminate_binders) {
            // A test linear in a binder pins the binder's value: substitute
            // the solution and drop both test and binder.
            bool eliminated = false;
            for (size_t bi = 0; bi < alt.binders.size() && !eliminated; ++bi) {
                const Name b = alt.binders[bi];
                for (size_t ti = 0; ti < alt.tests.size() && !eliminated; ++ti) {
                    if (auto sol = meadow::solve_linear_poly(alt.tests[ti], b, opt.limits)) {
                        alt.tests.erase(alt.tests.begin() + ti);
                        subst_everywhere(alt, b, *sol, alt.tests.size());
                        alt.binders.erase(alt.binders.begin() + bi);
                        eliminated = true;
                    }
                }
            }
            if (eliminated) {
                changed = true;
                continue;
            }
            // "Some binder value differs from t" holds for almost every
            // value; under the binder the test disappears.
            for (size_t bi = 0; bi < alt.binders.size() && !eliminated; ++bi) {
                const Name b = alt.binders[bi];
                for (size_t ti = 0; ti < alt.tests.size() && !eliminated; ++ti) {
                    if (!is_nonzero_indicator_of(alt.tests[ti], b, opt.limits)) continue;
                    std::set<Name> elsewhere;
                    for (size_t j = 0; j < alt.tests.size(); ++j)
                        if (j != ti) meadow::collect_poly_vars(alt.tests[j], elsewhere);
                    for (const auto& [a, q] : alt.entries) meadow::collect_poly_vars(q, elsewhere);
                    if (elsewhere.count(b)) continue;
                    alt.tests.erase(alt.tests.begin() + ti);
                    alt.binders.erase(alt.binders.begin() + bi);
                    eliminated = true;
                }
            }
            if (eliminated) {
                changed = true;
                continue;
            }
        }

        {
            // Binders no longer mentioned anywhere drop out.
            auto used = alt_vars(alt);
            auto it = std::remove_if(alt.binders.begin(), alt.binders.end(),
                                     [&](const Name& b) { return !used.count(b); });
            if (it != alt.binders.end()) {
                alt.binders.erase(it, alt.binders.end());
                changed = true;
            }
        }

        {
            // Pinned-value rewriting, greatest variable first: a test linear
            // in a variable pins its value, rewriting every other test and
            // all payloads. Each test pins at most one variable and earlier
            // pins are substituted before later ones are looked for, so the
            // reduced system does not depend on how the tests arrived.
            std::string before = alt_serial(alt);
            std::set<Name> vars = alt_vars(alt);
            std::set<size_t> pivoted;
            for (auto vit = vars.rbegin(); vit != vars.rend(); ++vit) {
                size_t row = 0;
                std::optional<Poly> sol;
                std::string row_key;
                for (size_t ti = 0; ti < alt.tests.size(); ++ti) {
                    if (pivoted.count(ti)) continue;
                    auto s = meadow::solve_linear_poly(alt.tests[ti], *vit, opt.limits);
                    if (!s) continue;
                    std::string key = meadow::serialize(alt.tests[ti]);
                    if (!sol || key < row_key) {
                        row = ti;
                        sol = std::move(s);
                        row_key = std::move(key);
                    }
                }
                if (!sol) continue;
                pivoted.insert(row);
                subst_everywhere(alt, *vit, *sol, row);
            }
            if (alt_serial(alt) != before) changed = true;
        }
    }

    // Joint satisfiability of the remaining tests: the product of their
    // "passes" indicators is identically zero exactly when no assignment
    // satisfies all of them, and never zero when every assignment does.
    if (alt.tests.size() >= 2) {
        Poly ind = meadow::poly_one();
        for (const auto& t : alt.tests)
            ind = meadow::poly_mul(
                ind, meadow::poly_sub(meadow::poly_one(),
                                      meadow::poly_mul(t, meadow::poly_inv(t))));
        try {
            Tri z = meadow::poly_is_zero(ind, opt.limits);
            if (z == Tri::ProvablyTrue) return std::nullopt;
            if (z == Tri::ProvablyFalse) alt.tests.clear();
        } catch (const resource_limit&) {
        }
    }

    // Canonical binder names x_1, x_2, ... skipping the free variables.
    // The assignment must not depend on how the alternative was assembled:
    // each position greedily takes the binder whose projected serial is
    // smallest, where the projection renames the candidate to its
    // prospective name (in whichever orientation serializes smaller) and
    // zeroes every other still-unnamed binder. The projection mentions no
    // staged names and no inherited signs, so binder arrival order and
    // parameterization sign cannot leak into the choice; the winning
    // orientation is applied so later rounds compare identical content.
    // Staging through the reserved '#' family avoids transient clashes.
    if (!alt.binders.empty()) {
        std::vector<Name> orig = alt.binders;
        for (size_t i = 0; i < orig.size(); ++i) {
            Name staged("#b", static_cast<long long>(i));
            alt = rename_binder(std::move(alt), orig[i], staged);
        }
        std::set<Name> used = alt_free_vars(alt);
        long long k = 0;
        for (size_t i = 0; i < alt.binders.size(); ++i) {
            Name cand("x", ++k);
            while (used.count(cand)) cand = Name("x", ++k);
            size_t best = i;
            bool best_neg = false;
            if (i + 1 < alt.binders.size()) {
                auto content_serial = [](const Alternative& a) {
                    std::vector<std::string> ts;
                    for (const auto& t : a.tests) ts.push_back(meadow::serialize(t));
                    std::sort(ts.begin(), ts.end());
                    std::string s = "t:";
                    for (const auto& t : ts) s += t + ",";
                    s += ";e:";
                    for (const auto& [at, q] : a.entries)
                        s += at.str() + "=" + meadow::serialize(q) + ",";
                    return s;
                };
                Poly zero = meadow::poly_zero();
                std::string best_serial;
                for (size_t j = i; j < alt.binders.size(); ++j) {
                    for (int neg = 0; neg < 2; ++neg) {
                        Poly repl = meadow::poly_var(cand);
                        if (neg) repl = meadow::poly_neg(repl);
                        auto project = [&](const Poly& p) {
                            Poly out = meadow::subst_var(p, alt.binders[j], repl);
                            for (size_t r = i; r < alt.binders.size(); ++r)
                                if (r != j) out = meadow::subst_var(out, alt.binders[r], zero);
                            return out;
                        };
                        Alternative trial;
                        for (const auto& t : alt.tests) trial.tests.push_back(project(t));
                        for (const auto& [at, q] : alt.entries) trial.entries.emplace(at, project(q));
                        std::string s = content_serial(trial);
                        if ((j == i && neg == 0) || s < best_serial) {
                            best_serial = std::move(s);
                            best = j;
                            best_neg = neg != 0;
                        }
                    }
                }
            }
            std::swap(alt.binders[i], alt.binders[best]);
            Name chosen = alt.binders[i];
            alt = rename_binder(std::move(alt), chosen, cand);
            if (best_neg) {
                Poly nc = meadow::poly_neg(meadow::poly_var(cand));
                for (auto& t : alt.tests) t = meadow::subst_var(t, cand, nc);
                for (auto& [a, q] : alt.entries) q = meadow::subst_var(q, cand, nc);
            }
            used.insert(cand);
        }

        // Sign-normalize each binder: both parameterizations of a flow
        // denote the same choice, so the first occurrence in serialized
        // order is made positive.
        std::sort(alt.tests.begin(), alt.tests.end(),
                  [](const Poly& a, const Poly& b) {
                      return meadow::serialize(a) < meadow::serialize(b);
                  });
        for (const Name& b : alt.binders) {
            int sign = 0;
            auto scan = [&](const Poly& p) {
                if (sign) return;
                for (const auto& [m, c] : p.terms)
                    for (const auto& [a, e] : m)
                        if (a->kind == meadow::AtomKind::Var && a->name == b) {
                            sign = c > 0 ? 1 : -1;
                            return;
                        }
            };
            for (const auto& t : alt.tests) scan(t);
            for (const auto& [a, q] : alt.entries) scan(q);
            if (sign < 0) {
                Poly neg = meadow::poly_neg(meadow::poly_var(b));
                for (auto& t : alt.tests) t = meadow::subst_var(t, b, neg);
                for (auto& [a, q] : alt.entries) q = meadow::subst_var(q, b, neg);
            }
        }
        // Flips may leave tests non-monic; re-normalize (flips cannot make
        // a test decidable or solvable, so this converges immediately).
        if (!normalize_tests(alt.tests, opt.limits)) return std::nullopt;
    }

    std::sort(alt.tests.begin(), alt.tests.end(),
              [](const Poly& a, const Poly& b) { return meadow::serialize(a) < meadow::serialize(b); });
    return alt;
}

}  // namespace bfdetail

/// Canonical basic form: normalized alternatives, merged pure tests,
/// deduplicated, deterministically ordered.
inline BasicForm canon(BasicForm bf, const CanonOpts& opt = {}) {
    std::vector<Alternative> out;
    for (auto& alt : bf.alts)
        if (auto c = bfdetail::canon_alt(std::move(alt), opt)) out.push_back(std::move(*c));

    // Alternatives that are nothing but tests combine: a choice between
    // zero tests passes iff some test passes, the product of the test
    // terms. An empty pure alternative absorbs them all.
    std::vector<Alternative> pure, rest;
    for (auto& alt : out) {
        if (alt.binders.empty() && alt.entries.empty())
            pure.push_back(std::move(alt));
        else
            rest.push_back(std::move(alt));
    }
    if (!pure.empty()) {
        bool empty_alt = false;
        for (const auto& alt : pure) empty_alt = empty_alt || alt.tests.empty();
        Alternative merged;
        if (!empty_alt) {
            Poly prod = meadow::poly_one();
            for (const auto& alt : pure) {
                Poly conj;
                if (alt.tests.size() == 1) {
                    conj = alt.tests[0];
                } else {
                    for (const auto& t : alt.tests)
                        conj = meadow::poly_add(conj,
                                                meadow::poly_mul(t, meadow::poly_inv(t)));
                }
                prod = meadow::poly_mul(prod, conj);
            }
            merged.tests.push_back(std::move(prod));
        }
        if (auto c = bfdetail::canon_alt(std::move(merged), opt)) rest.push_back(std::move(*c));
    }

    std::map<std::string, Alternative> uniq;
    for (auto& alt : rest) uniq.emplace(alt_serial(alt), std::move(alt));
    BasicForm res;
    for (auto& [s, alt] : uniq) res.alts.push_back(std::move(alt));
    return res;
}

// ---- reconstruction ---------------------------------------------------------

/// Preferred presentation of a test: solved for its greatest pinnable
/// variable, x minus the solution.
inline DataTerm test_term(const Poly& p, const Limits& lim) {
    std::set<Name> vars = meadow::poly_vars(p);
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        if (auto sol = meadow::solve_linear_poly(p, *it, lim)) {
            if (sol->is_zero()) return dt_var(*it);
            return dt_sub(dt_var(*it), meadow::term_of_poly(*sol));
        }
    }
    return meadow::term_of_poly(p);
}

/// Merge a test conjunction into the single data term whose zero test
/// expresses it.
inline std::optional<DataTerm> merged_test_term(const std::vector<Poly>& tests,
                                                const Limits& lim) {
    if (tests.empty()) return std::nullopt;
    if (tests.size() == 1) return test_term(tests[0], lim);
    Poly sum;
    for (const auto& t : tests)
        sum = meadow::poly_add(sum, meadow::poly_mul(t, meadow::poly_inv(t)));
    return meadow::term_of_poly(sum);
}

inline Tuplix to_term(const BasicForm& bf, const Limits& lim = {}) {
    if (bf.alts.empty()) return t_delta();
    Tuplix out = t_delta();
    for (const auto& alt : bf.alts) {
        Tuplix body = t_eps();
        if (auto t = merged_test_term(alt.tests, lim)) body = t_test(*t);
        for (const auto& [a, q] : alt.entries)
            body = t_conj(body, t_entry(a, meadow::term_of_poly(q)));
        for (auto it = alt.binders.rbegin(); it != alt.binders.rend(); ++it)
            body = t_sum(*it, body);
        out = t_alt(out, body);
    }
    return out;
}

}  // namespace tuplix
