#include <catch2/catch_amalgamated.hpp>

#include "tuplix/eq.hpp"
#include "tuplix/parse.hpp"

using namespace tuplix;

namespace {

EqResult eq(const std::string& a, const std::string& b) {
    return eq_tuplix(parse_term(a), parse_term(b));
}

}  // namespace

TEST_CASE("congruent presentations are decided equal") {
    CHECK(eq("a(1) & b(2)", "b(2) & a(1)").verdict == Verdict::Equal);
    CHECK(eq("a(1) + b(2)", "b(2) + a(1)").verdict == Verdict::Equal);
    CHECK(eq("a(1) & eps", "a(1)").verdict == Verdict::Equal);
    CHECK(eq("sum x . (a(-x) & b(x))", "sum y . (a(-y) & b(y))").verdict == Verdict::Equal);
    CHECK(eq("sum x . (a(x) & b(x))", "sum y . (b(y) & a(y))").verdict == Verdict::Equal);
    CHECK(eq("null", "[1 == 2]").verdict == Verdict::Equal);
    CHECK(eq("[0]", "eps").verdict == Verdict::Equal);
}

TEST_CASE("ground payload differences separate with a witness") {
    EqResult r = eq("a(1)", "a(2)");
    CHECK(r.verdict == Verdict::NotEqual);
    CHECK(r.witness.find("1") != std::string::npos);
    CHECK(r.witness.find("2") != std::string::npos);

    CHECK(eq("a(1) + a(2)", "a(1)").verdict == Verdict::NotEqual);
    CHECK(eq("a(1) & b(1)", "a(1)").verdict == Verdict::NotEqual);
    CHECK(eq("a(1)", "b(1)").verdict == Verdict::NotEqual);
}

TEST_CASE("open tests are compared conservatively") {
    CHECK(eq("[x]", "[y]").verdict == Verdict::Unknown);
    // The guarded branch is subsumed by the unguarded one, which structural
    // comparison cannot see; a definite "no" would be wrong here.
    CHECK(eq("[x] & a(1) + a(1)", "a(1)").verdict == Verdict::Unknown);
    CHECK(eq("[x] & a(1)", "a(1)").verdict == Verdict::Unknown);
}

TEST_CASE("mismatched quantified payloads stay open") {
    CHECK(eq("sum x . (a(x) & b(2 * x))", "sum x . (a(x) & b(x))").verdict ==
          Verdict::Unknown);
}

TEST_CASE("generically equal payloads are separated at degenerate points") {
    EqResult r = eq("a(x * n_1 / (n_1 + n_2) + x * n_2 / (n_1 + n_2))", "a(x)");
    // The payloads agree wherever n_1 + n_2 is invertible but differ when the
    // denominator collapses to zero; the sweep must find such a point.
    CHECK(r.verdict == Verdict::NotEqual);
    CHECK(r.witness.find("n_1") != std::string::npos);
}

TEST_CASE("uninterpreted function symbols block refutation") {
    CHECK(eq("a(f(1))", "a(f(1))").verdict == Verdict::Equal);
    CHECK(eq("a(f(1))", "a(f(2))").verdict == Verdict::Unknown);
}

TEST_CASE("function definitions are eliminated before comparison") {
    CHECK(eq("def f = lam x . x + x in a(f(1))", "a(2)").verdict == Verdict::Equal);
    CHECK(eq("def f = lam x . x + x in (a(f(1)) & b(f(f(1))))", "a(2) & b(4)").verdict ==
          Verdict::Equal);
}

TEST_CASE("verdicts and witnesses are deterministic") {
    const std::string lhs = "a(x * n_1 / (n_1 + n_2) + x * n_2 / (n_1 + n_2))";
    EqResult r1 = eq(lhs, "a(x)");
    EqResult r2 = eq(lhs, "a(x)");
    CHECK(r1.verdict == r2.verdict);
    CHECK(r1.witness == r2.witness);

    CHECK(std::string(verdict_str(Verdict::Equal)) == "equal");
    CHECK(std::string(verdict_str(Verdict::NotEqual)) == "not-equal");
    CHECK(std::string(verdict_str(Verdict::Unknown)) == "unknown");
}
