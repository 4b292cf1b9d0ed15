#include <catch2/catch_amalgamated.hpp>

#include "term_gen.hpp"
#include "tuplix/engine.hpp"
#include "tuplix/print.hpp"

using namespace tuplix;

namespace {

const Attribute A{"a"}, B{"b"}, C{"c"};
const Attribute PlusB{Name("b"), Sign::Plus}, MinusB{Name("b"), Sign::Minus};

/// Independent reading of the flux constraint: keep exactly the
/// alternatives whose neutral payloads sum to the negated offset.
testgen::GroundSet flux_oracle(const Rational& offset, const Tuplix& p) {
    testgen::GroundSet out;
    for (const auto& alt : testgen::oracle_eval(p)) {
        Rational total = offset;
        for (const auto& [attr, v] : alt)
            if (attr.sign == Sign::Flat) total += v;
        if (total == 0) out.insert(alt);
    }
    return out;
}

/// Flip roughly a third of the entries of a ground term into signed form,
/// leaving their oracle value intact only where the sign is Plus.
Tuplix mutate_signs(std::mt19937_64& rng, const Tuplix& p) {
    switch (p->kind) {
        case TKind::Entry: {
            if (rng() % 3 == 0)
                return t_entry(Attribute(p->attr.name, Sign::Plus), p->data);
            if (rng() % 3 == 0)
                return t_entry(Attribute(p->attr.name, Sign::Minus), dt_neg(p->data));
            return p;
        }
        case TKind::Conj: return t_conj(mutate_signs(rng, p->a), mutate_signs(rng, p->b));
        case TKind::Alt: return t_alt(mutate_signs(rng, p->a), mutate_signs(rng, p->b));
        default: return p;
    }
}

bool norm_eq(const Tuplix& a, const Tuplix& b, const EngineOpts& opts = {}) {
    return tuplix_equal(normalize(a, opts), normalize(b, opts));
}

}  // namespace

TEST_CASE("signed and flat notations convert both ways") {
    Name u("u");
    Tuplix outflux = t_entry(PlusB, dt_var(u));
    Tuplix influx = t_entry(MinusB, dt_var(u));
    CHECK(tuplix_str(to_flat(outflux)) == "b(u)");
    CHECK(tuplix_str(normalize(to_flat(influx))) == "b(-u)");

    UnitIo g{{Name("a")}, {Name("b"), Name("c")}};
    CHECK(tuplix_str(to_signed(g, t_entry(B, dt_int(2)))) == "+b(2)");
    CHECK(tuplix_str(normalize(to_signed(g, t_entry(A, dt_int(-2))))) == "-a(2)");
    CHECK_THROWS_AS(to_signed(g, outflux), malformed_input);
    CHECK_THROWS_AS(to_signed(g, t_entry(Attribute("z"), dt_int(1))), malformed_input);

    SECTION("round trip through a unit's perspective") {
        std::mt19937_64 rng(411);
        testgen::GenOpts o;
        for (int k = 0; k < 200; ++k) {
            Tuplix p = testgen::gen_term(rng, o);
            CHECK(norm_eq(to_flat(to_signed(g, p)), p));
        }
    }
}

TEST_CASE("flux constraint: defining identities") {
    Name uvar("u");
    DataTerm t = dt_add(dt_var(uvar), dt_int(1));
    DataTerm x = dt_var(Name("v"));
    Tuplix X = t_alt(t_conj(t_entry(A, dt_var(Name("v"))), t_entry(B, dt_int(2))),
                     t_test(dt_sub(dt_var(Name("v")), dt_int(1))));
    Tuplix Y = t_entry(C, dt_neg(dt_var(uvar)));

    CHECK(tuplix_equal(kirchhoff_t(t, t_delta()), t_delta()));
    CHECK(norm_eq(kirchhoff_t(t, t_eps()), t_test(t)));
    CHECK(norm_eq(kirchhoff_t(t, t_conj(t_test(x), X)),
                  t_conj(t_test(x), kirchhoff_t(t, X))));
    CHECK(norm_eq(kirchhoff_t(t, t_conj(t_entry(A, x), X)),
                  t_conj(t_entry(A, x), kirchhoff_t(dt_add(t, x), X))));
    CHECK(norm_eq(kirchhoff_t(t, t_alt(X, Y)),
                  t_alt(kirchhoff_t(t, X), kirchhoff_t(t, Y))));

    Name q("q");
    Tuplix P = t_conj(t_entry(A, dt_var(q)), t_entry(B, dt_sub(dt_var(uvar), dt_var(q))));
    CHECK(norm_eq(kirchhoff_t(t, t_sum(q, P)), t_sum(q, kirchhoff_t(t, P))));

    SECTION("binders in the scope are renamed off the offset") {
        // The offset mentions u, so the binder u must not capture it.
        Tuplix body = t_sum(uvar, t_entry(A, dt_var(uvar)));
        Tuplix direct = kirchhoff_t(t, body);
        // One alternative: a(s) with s + (u+1) pinned to zero.
        CHECK(norm_eq(direct, t_entry(A, dt_neg(t))));
    }

    SECTION("the operator node folds signs first; the raw constraint does not") {
        Tuplix visible = t_entry(PlusB, dt_int(1));
        CHECK(tuplix_equal(normalize(t_kirch(dt_int(0), visible)), t_delta()));
        CHECK(tuplix_str(normalize(kirchhoff_t(dt_int(0), visible))) == "+b(1)");
    }
}

TEST_CASE("flux constraint: ground alternatives keep exactly the balanced ones") {
    std::mt19937_64 rng(42977);
    testgen::GenOpts o;
    for (int k = 0; k < 600; ++k) {
        Tuplix p = testgen::gen_term(rng, o);
        Rational off(testgen::gen_int(rng, -2, 2));
        Tuplix pm = mutate_signs(rng, p);

        CHECK(testgen::oracle_eval(kirchhoff_t(dt_const(off), pm)) == flux_oracle(off, pm));
        CHECK(testgen::oracle_eval(kirchhoff(pm)) == flux_oracle(0, to_flat(pm)));

        // Idempotent: the added test changes no alternative's totals.
        Tuplix once = kirchhoff(p);
        CHECK(norm_eq(kirchhoff(once), once));

        // The canonical form of the constrained term reads back identically.
        CHECK(testgen::read_ground(normalize(t_kirch(dt_const(off), p))) ==
              flux_oracle(off, p));
    }
}

TEST_CASE("visible copies ride along without carrying flux") {
    UnitIo g{{Name("a")}, {Name("b"), Name("c")}};
    std::set<Attribute> signed_b{PlusB, MinusB};
    std::mt19937_64 rng(5151);
    testgen::GenOpts o;
    for (int k = 0; k < 200; ++k) {
        Tuplix p = testgen::gen_term(rng, o);
        Tuplix zp = sign_annotate(g, {B}, p);
        CHECK(norm_eq(clear_op(signed_b, kirchhoff_t(dt_int(0), zp)), kirchhoff(p)));
        CHECK(norm_eq(clear_op(signed_b, encapsulate({B}, zp)), encapsulate({B}, p)));
    }
}

TEST_CASE("focus on one unit of a two-unit pipeline") {
    // in --a--> g --b--> h --c--> out, g forwarding 1 unit to h.
    NetIo net;
    net[Name("g")] = UnitIo{{Name("a")}, {Name("b")}};
    net[Name("h")] = UnitIo{{Name("b")}, {Name("c")}};
    EngineOpts opts;
    opts.net = &net;

    Tuplix Pg = t_conj(t_entry(A, dt_int(-1)), t_entry(B, dt_int(1)));
    Tuplix Ph = t_conj(t_entry(B, dt_int(-1)), t_entry(C, dt_int(1)));

    Tuplix plain = normalize(t_encap({B}, t_conj(Pg, Ph)), opts);
    CHECK(tuplix_str(plain) == "a(-1) & c(1)");

    Tuplix focused = normalize(t_encap({B}, t_conj(t_zeta(Name("g"), {B}, Pg), Ph)), opts);
    CHECK(tuplix_str(focused) == "a(-1) & +b(1) & c(1)");

    std::set<Attribute> J;
    for (const Name& n : {Name("a"), Name("b")}) {
        J.insert(Attribute(n));
        J.insert(Attribute(n, Sign::Plus));
        J.insert(Attribute(n, Sign::Minus));
    }
    CHECK(tuplix_str(normalize(t_select(J, focused), opts)) == "a(-1) & +b(1)");

    Tuplix both = normalize(
        t_encap({B}, t_conj(t_zeta(Name("g"), {B}, Pg), t_zeta(Name("h"), {B}, Ph))), opts);
    CHECK(tuplix_str(both) == "a(-1) & +b(1) & -b(1) & c(1)");

    SECTION("mismatched flux nullifies, matched flux survives, copies agree") {
        for (long long s = -2; s <= 2; ++s)
            for (long long t = -2; t <= 2; ++t) {
                Tuplix pg = t_conj(t_entry(A, dt_int(-s)), t_entry(B, dt_int(s)));
                Tuplix ph = t_conj(t_entry(B, dt_int(-t)), t_entry(C, dt_int(t)));
                Tuplix r = normalize(
                    t_encap({B}, t_conj(t_zeta(Name("g"), {B}, pg), ph)), opts);
                if (s == t)
                    CHECK(testgen::oracle_eval(r) ==
                          testgen::oracle_eval(t_conj(
                              t_entry(A, dt_int(-s)),
                              t_conj(t_entry(PlusB, dt_int(s)), t_entry(C, dt_int(t))))));
                else
                    CHECK(is_delta(r));
            }
    }
}

namespace {

// Periodic reserve-and-spend pair: the buffer R forwards whatever comes
// in, the unit Q withdraws a fixed amount, banks a fixed fraction of its
// income and spends the rest.
Tuplix reserve_def(int n) {
    Name u("u"), v("v"), w("w"), x("x");
    Tuplix body = t_conj(
        t_entry(Attribute(Name("a", n)), dt_neg(dt_var(u))),
        t_conj(t_entry(Attribute(Name("b", n)), dt_neg(dt_var(v))),
               t_conj(t_entry(Attribute(Name("c", n)), dt_var(w)),
                      t_entry(Attribute(Name("a", n + 1)), dt_var(x)))));
    return t_kirch(dt_int(0), t_sum(u, t_sum(v, t_sum(w, t_sum(x, body)))));
}

DataTerm spend_rate(int n) {
    // pw + (1-k)*inc_n
    return dt_add(dt_var(Name("pw")),
                  dt_mul(dt_sub(dt_int(1), dt_var(Name("k"))), dt_var(Name("inc", n))));
}

Tuplix unit_core(int n) {
    return t_conj(
        t_entry(Attribute(Name("c", n)), dt_neg(dt_var(Name("pw")))),
        t_conj(t_entry(Attribute(Name("d", n)), dt_neg(dt_var(Name("inc", n)))),
               t_entry(Attribute(Name("b", n + 1)),
                       dt_mul(dt_var(Name("k")), dt_var(Name("inc", n))))));
}

Tuplix unit_def(int n) {
    Name u("u");
    return t_kirch(dt_int(0),
                   t_sum(u, t_conj(unit_core(n), t_entry(Attribute(Name("e", n)), dt_var(u)))));
}

}  // namespace

TEST_CASE("reserve buffer: the flux constraint becomes a balance test") {
    Name u("u"), v("v"), w("w"), x("x");
    for (int n : {0, 1}) {
        Tuplix entries = t_conj(
            t_entry(Attribute(Name("a", n)), dt_neg(dt_var(u))),
            t_conj(t_entry(Attribute(Name("b", n)), dt_neg(dt_var(v))),
                   t_conj(t_entry(Attribute(Name("c", n)), dt_var(w)),
                          t_entry(Attribute(Name("a", n + 1)), dt_var(x)))));
        DataTerm balance = dt_sub(dt_add(dt_var(u), dt_var(v)), dt_add(dt_var(w), dt_var(x)));
        Tuplix expected =
            t_sum(u, t_sum(v, t_sum(w, t_sum(x, t_conj(t_test(balance), entries)))));
        CHECK(norm_eq(reserve_def(n), expected));
    }
}

TEST_CASE("spending unit: the flux constraint pins the expenditure") {
    Name u("u");
    for (int n : {0, 1}) {
        Tuplix defn = unit_def(n);
        DataTerm pinned = dt_sub(dt_var(u), spend_rate(n));
        Tuplix stepwise = t_sum(
            u, t_conj(t_test(pinned),
                      t_conj(unit_core(n), t_entry(Attribute(Name("e", n)), dt_var(u)))));
        Tuplix closed = t_conj(unit_core(n), t_entry(Attribute(Name("e", n)), spend_rate(n)));
        CHECK(norm_eq(defn, stepwise));
        CHECK(norm_eq(defn, closed));
        CHECK(norm_eq(stepwise, closed));
    }
}
