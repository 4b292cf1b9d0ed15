#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "term_gen.hpp"
#include "tuplix/engine.hpp"
#include "tuplix/parse.hpp"
#include "tuplix/print.hpp"

using namespace tuplix;

namespace {

const Name X{"x"}, Y{"y"}, F{"f"}, N1{"n", 1};
const Attribute A{"a"}, B{"b"}, C{"c"};

void data_round_trip(const DataTerm& t) {
    std::string printed = data_str(t);
    INFO("printed: " << printed);
    CHECK(data_equal(parse_data(printed), t));
}

void term_round_trip(const Tuplix& t) {
    std::string printed = tuplix_str(t);
    INFO("printed: " << printed);
    CHECK(tuplix_equal(parse_term(printed), t));
}

}  // namespace

TEST_CASE("data terms survive print and reparse") {
    data_round_trip(dt_int(-1));
    data_round_trip(dt_const(Rational(1, 2)));
    data_round_trip(dt_const(Rational(-3, 4)));
    data_round_trip(dt_var(Name("x", 12)));
    data_round_trip(dt_add(dt_var(X), dt_int(-1)));
    data_round_trip(dt_sub(dt_var(X), dt_var(Y)));
    data_round_trip(dt_neg(dt_var(X)));
    data_round_trip(dt_mul(dt_neg(dt_var(X)), dt_var(Y)));
    data_round_trip(dt_mul(dt_var(X), dt_inv(dt_var(Y))));
    data_round_trip(dt_mul(dt_const(Rational(1, 2)), dt_inv(dt_var(Y))));
    data_round_trip(dt_inv(dt_inv(dt_var(X))));
    data_round_trip(dt_inv(dt_add(dt_var(X), dt_var(Y))));
    data_round_trip(dt_app(F, {dt_int(1), dt_var(X)}));
    data_round_trip(dt_app(F, {dt_app(F, {dt_var(X)})}));
    data_round_trip(dt_lam_app(make_fn({X}, dt_add(dt_var(X), dt_var(X))), {dt_int(3)}));
    data_round_trip(dt_add(dt_mul(dt_var(X), dt_var(Y)), dt_neg(dt_mul(dt_var(Y), dt_var(X)))));
    data_round_trip(dt_div(dt_div(dt_var(X), dt_var(Y)), dt_var(X)));
}

TEST_CASE("terms survive print and reparse") {
    term_round_trip(t_eps());
    term_round_trip(t_delta());
    term_round_trip(t_test(dt_sub(dt_var(X), dt_int(1))));
    term_round_trip(t_entry(A, dt_int(-1)));
    term_round_trip(t_entry(Attribute{Name("b"), Sign::Plus}, dt_int(1)));
    term_round_trip(t_entry(Attribute{Name("b"), Sign::Minus}, dt_var(X)));
    term_round_trip(t_conj(t_conj(t_entry(A, dt_int(1)), t_entry(B, dt_int(2))),
                           t_entry(C, dt_int(3))));
    term_round_trip(t_conj(t_entry(A, dt_int(1)),
                           t_conj(t_entry(B, dt_int(2)), t_entry(C, dt_int(3)))));
    term_round_trip(t_alt(t_alt(t_entry(A, dt_int(1)), t_entry(A, dt_int(2))),
                          t_entry(A, dt_int(3))));
    term_round_trip(t_alt(t_entry(A, dt_int(1)),
                          t_conj(t_entry(A, dt_int(2)), t_entry(B, dt_int(2)))));
    term_round_trip(t_sum(X, t_conj(t_entry(A, dt_neg(dt_var(X))), t_entry(B, dt_var(X)))));
    term_round_trip(t_sum(X, t_alt(t_entry(A, dt_var(X)), t_entry(B, dt_var(X)))));
    term_round_trip(t_alt(t_sum(X, t_entry(A, dt_var(X))), t_entry(B, dt_int(2))));
    term_round_trip(t_scalar(dt_var(N1), t_entry(A, dt_int(1))));
    term_round_trip(t_scalar(dt_int(2), t_scalar(dt_var(X), t_entry(A, dt_int(1)))));
    term_round_trip(t_scalar(dt_add(dt_var(X), dt_int(1)), t_entry(A, dt_int(1))));
    term_round_trip(t_scalar(dt_int(-2), t_entry(A, dt_int(1))));
    term_round_trip(t_clear({A, B}, t_entry(C, dt_int(1))));
    term_round_trip(t_select({A, Attribute{Name("b"), Sign::Plus}}, t_entry(A, dt_int(1))));
    term_round_trip(t_encap({B}, t_conj(t_entry(A, dt_int(1)), t_entry(B, dt_var(X)))));
    term_round_trip(t_zeta(Name("g"), {A, B}, t_entry(A, dt_int(1))));
    term_round_trip(t_kirch(dt_int(0), t_entry(A, dt_var(X))));
    term_round_trip(t_kirch(dt_var(Y), t_entry(A, dt_var(X))));

    LambdaPtr dbl = make_fn({X}, dt_add(dt_var(X), dt_var(X)));
    term_round_trip(t_gamma(F, dbl));
    term_round_trip(t_sumfn(F, t_entry(A, dt_app(F, {dt_int(1)}))));
    term_round_trip(t_sumfn(F, t_conj(t_gamma(F, dbl), t_entry(A, dt_app(F, {dt_int(1)})))));
}

TEST_CASE("reader accepts sugar the printer avoids") {
    CHECK(tuplix_equal(parse_term("[x == y]"), t_test(dt_sub(dt_var(X), dt_var(Y)))));
    CHECK(tuplix_equal(parse_term("a_3(x_1)"),
                       t_entry(Attribute{Name("a", 3)}, dt_var(Name("x", 1)))));
    // A parenthesized data expression is a scale factor only before '*'.
    CHECK(tuplix_equal(parse_term("(x + 1) * a(2)"),
                       t_scalar(dt_add(dt_var(X), dt_int(1)), t_entry(A, dt_int(2)))));
    CHECK(tuplix_equal(parse_term("(a(1)) & b(2)"),
                       t_conj(t_entry(A, dt_int(1)), t_entry(B, dt_int(2)))));
    CHECK(tuplix_equal(parse_term("sum x . a(x) + b(2)"),
                       t_sum(X, t_alt(t_entry(A, dt_var(X)), t_entry(B, dt_int(2))))));
    CHECK(data_equal(parse_data("4/2"), dt_const(Rational(2))));
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_term("\n\n @");
        FAIL("expected a parse error");
    } catch (const parse_error& e) {
        CHECK(e.line == 3);
        CHECK(e.column == 2);
    }
    CHECK_THROWS_AS(parse_term("a("), parse_error);
    CHECK_THROWS_AS(parse_term("a(1) b(2)"), parse_error);
    CHECK_THROWS_AS(parse_term("x ^ 2"), parse_error);
    CHECK_THROWS_AS(parse_data("(lam x . x)(1, 2) +"), parse_error);
}

TEST_CASE("normal forms round-trip through the reader") {
    testgen::GenOpts open;
    open.vars = {X, Y};
    open.with_sums = true;
    testgen::GenOpts ground;
    for (unsigned seed = 1; seed <= 60; ++seed) {
        std::mt19937_64 rng(seed);
        const testgen::GenOpts& o = seed % 2 ? open : ground;
        Tuplix n = normalize(testgen::gen_term(rng, o));
        std::string printed = tuplix_str(n);
        INFO("seed " << seed << ": " << printed);
        CHECK(tuplix_equal(parse_term(printed), n));
    }
}

TEST_CASE("workspace statements populate the workspace") {
    const std::string src = R"(# transfer network and unit specs
option seed = 42
option branch-budget = 500
option trace = on

net pay {
    unit g { in: a; out: b, c; }
    unit h { in: b; out: d; }
}

spec g = sum x . (a(-x) & b(x))
spec h = sum x . (b(-x) & d(x))

let closed = a(-1) & +b(1) & c(1)
let zero = [0]
)";
    Workspace ws = parse_workspace(src);
    REQUIRE(ws.errors.empty());
    CHECK(ws.options.seed == 42);
    CHECK(ws.options.branch_budget == 500);
    CHECK(ws.options.trace);

    REQUIRE(ws.networks.count("pay") == 1);
    const Ftn& net = ws.networks.at("pay");
    REQUIRE(net.units.count(Name("g")) == 1);
    CHECK(net.units.at(Name("g")).in == std::set<Name>{Name("a")});
    CHECK(net.units.at(Name("g")).out == (std::set<Name>{Name("b"), Name("c")}));
    CHECK(net.attrs == (std::set<Name>{Name("a"), Name("b"), Name("c"), Name("d")}));

    REQUIRE(ws.specs.size() == 2);
    CHECK(ws.specs[0].unit == Name("g"));
    CHECK(ws.specs[1].unit == Name("h"));

    REQUIRE(ws.terms.count("closed") == 1);
    CHECK(tuplix_equal(ws.terms.at("closed"),
                       t_conj(t_conj(t_entry(A, dt_int(-1)),
                                     t_entry(Attribute{Name("b"), Sign::Plus}, dt_int(1))),
                              t_entry(C, dt_int(1)))));
}

TEST_CASE("statement errors are recorded and parsing recovers") {
    const std::string src = R"(let good = a(1)
let bad = a(]
let alsogood = b(2)
let good = a(3)
)";
    Workspace ws = parse_workspace(src);
    REQUIRE(ws.errors.size() == 2);
    CHECK(ws.errors[0].line == 2);
    CHECK(ws.errors[1].line == 4);  // duplicate binding
    REQUIRE(ws.terms.count("alsogood") == 1);
    REQUIRE(ws.terms.count("good") == 1);
    CHECK(tuplix_equal(ws.terms.at("good"), t_entry(A, dt_int(3))));  // latest wins
}
