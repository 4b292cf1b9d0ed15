#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tuplix/engine.hpp"
#include "tuplix/funcdef.hpp"
#include "tuplix/print.hpp"

namespace tuplix {

enum class Verdict { Equal, NotEqual, Unknown };

inline const char* verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Equal: return "equal";
        case Verdict::NotEqual: return "not-equal";
        default: return "unknown";
    }
}

/// Outcome of an equality query. NotEqual always carries a witness: the
/// first mismatch plus, when one was found by evaluation, a separating
/// assignment. Unknown may carry a note saying what blocked the decision.
struct EqResult {
    Verdict verdict = Verdict::Unknown;
    std::string witness;
};

namespace eqdetail {

/// eq_data samples generic rationals, which miss the measure-zero loci
/// where zero-totalized inverses kick in (a payload with u * u^-1 differs
/// from its cancelled form only at u = 0). A small-integer sweep lands on
/// those loci routinely; any hit is a sound separation.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t seed) {
    return base ^ (seed * 0x9E3779B97F4A7C15ULL);
}

inline std::optional<Assignment> separate_small(const DataTerm& a, const DataTerm& b,
                                                std::uint64_t seed = 0, int samples = 512) {
    if (mentions_fn_app(a) || mentions_fn_app(b)) return std::nullopt;
    std::set<Name> vars = vars_of(a);
    auto vb = vars_of(b);
    vars.insert(vb.begin(), vb.end());
    std::mt19937_64 rng(mix_seed(0x5EEDULL, seed));
    for (int i = 0; i < samples; ++i) {
        Assignment env;
        for (const auto& v : vars) env[v] = Rational(static_cast<long long>(rng() % 5) - 2);
        if (eval_data(a, env) != eval_data(b, env)) return env;
    }
    return std::nullopt;
}

inline std::string assignment_str(const Assignment& env) {
    std::string s;
    for (const auto& [v, q] : env) {
        if (!s.empty()) s += ", ";
        s += v.str() + " = " + rational_str(q);
    }
    return s;
}

struct PairOutcome {
    Verdict verdict = Verdict::Equal;
    std::string detail;
};

inline PairOutcome compare_alt(const Alternative& x, const Alternative& y, size_t index,
                               const Limits& lim, std::uint64_t seed = 0) {
    std::ostringstream where;
    where << "alternative " << index + 1 << ": ";
    if (x.binders != y.binders)
        return {Verdict::Unknown, where.str() + "binder prefixes differ"};
    if (x.tests.size() != y.tests.size())
        return {Verdict::Unknown, where.str() + "test counts differ"};
    for (size_t i = 0; i < x.tests.size(); ++i)
        if (!meadow::poly_equal(x.tests[i], y.tests[i]))
            return {Verdict::Unknown,
                    where.str() + "tests differ: [" +
                        data_str(meadow::term_of_poly(x.tests[i])) + "] vs [" +
                        data_str(meadow::term_of_poly(y.tests[i])) + "]"};

    auto xi = x.entries.begin();
    auto yi = y.entries.begin();
    PairOutcome pending{Verdict::Equal, ""};
    while (xi != x.entries.end() || yi != y.entries.end()) {
        if (yi == y.entries.end() || (xi != x.entries.end() && xi->first < yi->first)) {
            std::string d = where.str() + "entry " + xi->first.str() + "(" +
                            data_str(meadow::term_of_poly(xi->second)) + ") has no counterpart";
            return {Verdict::NotEqual, d};
        }
        if (xi == x.entries.end() || yi->first < xi->first) {
            std::string d = where.str() + "entry " + yi->first.str() + "(" +
                            data_str(meadow::term_of_poly(yi->second)) + ") has no counterpart";
            return {Verdict::NotEqual, d};
        }
        DataTerm p = meadow::term_of_poly(xi->second);
        DataTerm q = meadow::term_of_poly(yi->second);
        meadow::EqOptions eo;
        eo.limits = lim;
        eo.seed = mix_seed(eo.seed, seed);
        Tri r = meadow::eq_data(p, q, eo);
        if (r == Tri::Unknown) {
            if (auto env = separate_small(p, q, seed)) {
                std::string d = where.str() + "payload of " + xi->first.str() + " differs: " +
                                data_str(p) + " vs " + data_str(q) + " at " +
                                assignment_str(*env);
                return {Verdict::NotEqual, d};
            }
            if (pending.verdict == Verdict::Equal)
                pending = {Verdict::Unknown, where.str() + "payload of " + xi->first.str() +
                                                 " not decidably equal: " + data_str(p) +
                                                 " vs " + data_str(q)};
        } else if (r == Tri::ProvablyFalse) {
            std::string d = where.str() + "payload of " + xi->first.str() + " differs: " +
                            data_str(p) + " vs " + data_str(q);
            if (auto env = separate_small(p, q, seed)) d += " at " + assignment_str(*env);
            return {Verdict::NotEqual, d};
        }
        ++xi;
        ++yi;
    }
    return pending;
}

}  // namespace eqdetail

/// Provable equality of two terms. Both sides run the full pipeline
/// (definitions, operators, canonical form); identical canonical forms are
/// Equal. Otherwise alternatives are compared pairwise in canonical order.
/// A mismatch is only a definite refutation when it cannot be an artifact
/// of parameterization or conditional overlap, which requires both forms to
/// be free of binders and retained tests; any difference in such forms
/// separates the two sides under some assignment. Everything else reports
/// Unknown with a note.
inline EqResult eq_tuplix(const Tuplix& a, const Tuplix& b, const EngineOpts& opts = {},
                          std::uint64_t seed = 0) {
    BasicForm fa, fb;
    try {
        fa = normal_form(eliminate_defs(a), opts);
        fb = normal_form(eliminate_defs(b), opts);
    } catch (const malformed_input& e) {
        return {Verdict::Unknown, std::string("not reducible to basic form: ") + e.what()};
    }

    auto serial = [](const BasicForm& bf) {
        std::string s;
        for (const auto& alt : bf.alts) s += alt_serial(alt) + "|";
        return s;
    };
    if (serial(fa) == serial(fb)) return {Verdict::Equal, ""};

    bool plain = true;
    for (const auto& alt : fa.alts) plain = plain && alt.binders.empty() && alt.tests.empty();
    for (const auto& alt : fb.alts) plain = plain && alt.binders.empty() && alt.tests.empty();
    auto gate = [&](EqResult r) {
        if (r.verdict == Verdict::NotEqual && !plain) r.verdict = Verdict::Unknown;
        return r;
    };

    if (fa.alts.size() != fb.alts.size()) {
        std::ostringstream d;
        d << "alternative counts differ: " << fa.alts.size() << " vs " << fb.alts.size();
        return gate({Verdict::NotEqual, d.str()});
    }

    EqResult out{Verdict::Equal, ""};
    for (size_t i = 0; i < fa.alts.size(); ++i) {
        auto r = eqdetail::compare_alt(fa.alts[i], fb.alts[i], i, opts.limits, seed);
        if (r.verdict == Verdict::Unknown) {
            out = {Verdict::Unknown, r.detail};
            break;
        }
        if (r.verdict == Verdict::NotEqual && out.verdict == Verdict::Equal)
            out = {Verdict::NotEqual, r.detail};
    }
    if (out.verdict == Verdict::Equal)
        // Serials differed but every aligned pair compared equal: the gap is
        // below payload equality (test presentation), so stay honest.
        out = {Verdict::Unknown, "canonical forms differ only in test presentation"};
    return gate(out);
}

}  // namespace tuplix
