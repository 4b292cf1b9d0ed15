#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tuplix/meadow.hpp"

using namespace tuplix;
using namespace tuplix::meadow;

namespace {

DataTerm V(const char* n) { return dt_var(Name(n)); }

DataTerm random_term(std::mt19937_64& rng, int depth) {
    switch (rng() % (depth == 0 ? 2 : 6)) {
        case 0: return dt_int(static_cast<long long>(rng() % 11) - 5);
        case 1: return dt_var(Name(std::string(1, static_cast<char>('x' + rng() % 3))));
        case 2: return dt_neg(random_term(rng, depth - 1));
        case 3: return dt_add(random_term(rng, depth - 1), random_term(rng, depth - 1));
        case 4: return dt_mul(random_term(rng, depth - 1), random_term(rng, depth - 1));
        default: return dt_inv(random_term(rng, depth - 1));
    }
}

Assignment random_env(std::mt19937_64& rng) {
    Assignment env;
    for (const char* v : {"x", "y", "z"}) env[Name(v)] = random_rational(rng);
    return env;
}

Tri zero(const DataTerm& t) { return is_zero(t); }

}  // namespace

TEST_CASE("normalization preserves the value of every term") {
    std::mt19937_64 rng(20260815);
    for (int i = 0; i < 300; ++i) {
        DataTerm t = random_term(rng, 4);
        DataTerm n = normalize_data(t);
        for (int j = 0; j < 8; ++j) {
            Assignment env = random_env(rng);
            REQUIRE(eval_data(t, env) == eval_data(n, env));
        }
    }
}

TEST_CASE("normalization is idempotent") {
    std::mt19937_64 rng(424242);
    for (int i = 0; i < 300; ++i) {
        DataTerm n = normalize_data(random_term(rng, 4));
        REQUIRE(data_equal(normalize_data(n), n));
    }
}

TEST_CASE("ring and inverse laws hold identically") {
    DataTerm x = V("x"), y = V("y"), z = V("z");
    CHECK(zero(dt_sub(dt_add(dt_add(x, y), z), dt_add(x, dt_add(y, z)))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_add(x, y), dt_add(y, x))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_add(x, dt_int(0)), x)) == Tri::ProvablyTrue);
    CHECK(zero(dt_add(x, dt_neg(x))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_mul(dt_mul(x, y), z), dt_mul(x, dt_mul(y, z)))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_mul(x, y), dt_mul(y, x))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_mul(dt_int(1), x), x)) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_mul(x, dt_add(y, z)), dt_add(dt_mul(x, y), dt_mul(x, z)))) ==
          Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_inv(dt_inv(x)), x)) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_mul(x, dt_mul(x, dt_inv(x))), x)) == Tri::ProvablyTrue);
}

TEST_CASE("derived inverse identities") {
    DataTerm x = V("x"), y = V("y");
    CHECK(zero(dt_inv(dt_int(0))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_inv(dt_neg(x)), dt_neg(dt_inv(x)))) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_inv(dt_mul(x, y)), dt_mul(dt_inv(x), dt_inv(y)))) == Tri::ProvablyTrue);
    CHECK(zero(dt_mul(dt_int(0), x)) == Tri::ProvablyTrue);
    CHECK(zero(dt_sub(dt_mul(x, dt_neg(y)), dt_neg(dt_mul(x, y)))) == Tri::ProvablyTrue);
    DataTerm xx = dt_mul(x, dt_inv(x));
    CHECK(zero(dt_sub(dt_mul(xx, xx), xx)) == Tri::ProvablyTrue);
}

TEST_CASE("zero and one are provably distinct") {
    CHECK(zero(dt_int(1)) == Tri::ProvablyFalse);
    CHECK(eq_data(dt_int(0), dt_int(1)) == Tri::ProvablyFalse);
}

TEST_CASE("the inverse law is exactly conditional") {
    DataTerm x = V("x");
    DataTerm residue = dt_sub(dt_mul(x, dt_inv(x)), dt_int(1));
    CHECK(zero(dt_mul(x, residue)) == Tri::ProvablyTrue);
    CHECK(zero(residue) == Tri::Unknown);
    CHECK(eq_data(dt_mul(x, dt_inv(x)), dt_int(1)) != Tri::ProvablyTrue);
}

TEST_CASE("factored inverses agree with the inverse of the product") {
    DataTerm x = V("x"), y = V("y");
    DataTerm lhs = dt_inv(dt_sub(dt_mul(x, x), dt_mul(y, y)));
    DataTerm rhs = dt_mul(dt_inv(dt_sub(x, y)), dt_inv(dt_add(x, y)));
    CHECK(zero(dt_sub(lhs, rhs)) == Tri::ProvablyTrue);
}

TEST_CASE("jointly contradictory zero indicators annihilate") {
    DataTerm x = V("x");
    auto ind = [](const DataTerm& t) {  // 1 exactly where t vanishes
        return dt_sub(dt_int(1), dt_mul(t, dt_inv(t)));
    };
    CHECK(zero(dt_mul(ind(x), ind(dt_sub(x, dt_int(1))))) == Tri::ProvablyTrue);
}

TEST_CASE("conditional simplifications stay undecided") {
    DataTerm x = V("x"), y = V("y");
    CHECK(zero(dt_sub(dt_mul(x, dt_mul(y, dt_inv(y))), x)) == Tri::Unknown);
    CHECK(zero(dt_add(dt_mul(x, x), dt_int(1))) == Tri::Unknown);
}

TEST_CASE("substitution composes with normalization") {
    DataTerm x = V("x");
    DataTerm doubled = dt_add(x, x);
    CHECK(data_str(normalize_data(substitute_data(doubled, Name("x"), dt_int(2)))) == "4");
    DataTerm guard = dt_mul(x, dt_inv(x));
    CHECK(data_str(normalize_data(substitute_data(guard, Name("x"), dt_int(0)))) == "0");
}

TEST_CASE("data equality verdicts") {
    DataTerm x = V("x"), y = V("y");
    DataTerm sq = dt_mul(dt_add(x, y), dt_add(x, y));
    DataTerm expanded =
        dt_add(dt_add(dt_mul(x, x), dt_mul(dt_int(2), dt_mul(x, y))), dt_mul(y, y));
    CHECK(eq_data(sq, expanded) == Tri::ProvablyTrue);
    CHECK(eq_data(x, y) == Tri::ProvablyFalse);
    DataTerm quotient = dt_mul(dt_sub(dt_mul(x, x), dt_mul(y, y)), dt_inv(dt_sub(x, y)));
    CHECK(eq_data(quotient, dt_add(x, y)) != Tri::ProvablyTrue);
}

TEST_CASE("zero-set comparison of guards") {
    Poly x = poly_var(Name("x"));
    Poly y = poly_var(Name("y"));
    CHECK(same_zero_set(x, poly_scale(x, 2)) == Tri::ProvablyTrue);
    CHECK(same_zero_set(x, poly_mul(x, x)) == Tri::ProvablyTrue);
    CHECK(same_zero_set(poly_one(), poly_const(2)) == Tri::ProvablyTrue);
    CHECK(same_zero_set(x, y) == Tri::Unknown);
    CHECK(same_zero_set(x, poly_sub(x, poly_one())) == Tri::Unknown);
}

TEST_CASE("linear solving demands a provably nonzero coefficient") {
    Name x("x");
    DataTerm X = dt_var(x), Y = V("y");
    auto sol = solve_linear(dt_add(dt_mul(dt_int(2), X), Y), x);
    REQUIRE(sol.has_value());
    CHECK(zero(dt_add(dt_mul(dt_int(2), *sol), Y)) == Tri::ProvablyTrue);

    CHECK_FALSE(solve_linear(dt_sub(dt_mul(X, Y), dt_int(1)), x).has_value());
    CHECK_FALSE(solve_linear(dt_sub(dt_mul(X, X), dt_int(1)), x).has_value());
    CHECK_FALSE(solve_linear(dt_add(Y, dt_int(1)), x).has_value());
    CHECK_FALSE(solve_linear(dt_mul(X, dt_inv(X)), x).has_value());

    auto s2 = solve_linear(dt_sub(dt_mul(dt_int(3), X), dt_int(6)), x);
    REQUIRE(s2.has_value());
    CHECK(data_equal(*s2, dt_int(2)));
}

TEST_CASE("canonical shapes of inverses") {
    DataTerm x = V("x"), y = V("y");
    CHECK(data_str(normalize_data(dt_inv(dt_int(0)))) == "0");
    CHECK(data_str(normalize_data(dt_mul(x, dt_int(1)))) == "x");
    CHECK(data_str(normalize_data(dt_inv(dt_neg(x)))) == "-x^-1");
    CHECK(data_str(normalize_data(dt_inv(dt_inv(x)))) == "x");
    CHECK(data_str(normalize_data(dt_inv(dt_mul(dt_int(2), x)))) == "1/2 * x^-1");

    auto same = [](const DataTerm& a, const DataTerm& b) {
        return data_equal(normalize_data(a), normalize_data(b));
    };
    CHECK(same(dt_inv(dt_mul(x, y)), dt_mul(dt_inv(x), dt_inv(y))));
    CHECK(same(dt_inv(dt_add(dt_mul(x, x), dt_mul(x, y))),
               dt_mul(dt_inv(x), dt_inv(dt_add(x, y)))));
    CHECK(same(dt_inv(dt_add(dt_mul(dt_int(2), x), dt_mul(dt_int(2), y))),
               dt_mul(dt_const(Rational(1, 2)), dt_inv(dt_add(x, y)))));
}

TEST_CASE("case-split budget is enforced") {
    DataTerm sum = dt_int(7);
    for (int i = 0; i < 17; ++i) {
        DataTerm v = dt_var(Name("x", i));
        sum = dt_add(sum, dt_mul(v, dt_inv(v)));
    }
    CHECK_THROWS_AS(is_zero(sum), resource_limit);
}

TEST_CASE("total inverse evaluates division by zero to zero") {
    Assignment env;
    env[Name("x")] = 0;
    CHECK(eval_data(dt_div(dt_int(1), V("x")), env) == 0);
    CHECK(eval_data(dt_inv(V("x")), env) == 0);
}
