#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "madvec/fields.hpp"

using namespace madvec;

TEST_CASE("field spec construction and parsing") {
    CHECK(FieldSpec::prime(2).name() == "gf2");
    CHECK(FieldSpec::prime(65521).name() == "gf65521");
    CHECK(FieldSpec::rationals().name() == "q");
    CHECK(FieldSpec::parse("gf5") == FieldSpec::prime(5));
    CHECK(FieldSpec::parse("q") == FieldSpec::rationals());

    CHECK_THROWS_AS(FieldSpec::prime(1), InvalidArgumentError);
    CHECK_THROWS_AS(FieldSpec::prime(4), InvalidArgumentError);
    CHECK_THROWS_AS(FieldSpec::prime(65536), InvalidArgumentError);  // 2^16
    CHECK_THROWS_AS(FieldSpec::prime(65537), InvalidArgumentError);  // prime but too big
    CHECK_THROWS_AS(FieldSpec::parse("gf"), InvalidArgumentError);
    CHECK_THROWS_AS(FieldSpec::parse("gf4"), InvalidArgumentError);
    CHECK_THROWS_AS(FieldSpec::parse("r"), InvalidArgumentError);
}

TEST_CASE("prime field arithmetic") {
    auto f5 = FieldSpec::prime(5);
    auto s = [&](long long n) { return Scalar::from_integer(f5, n); };

    CHECK(s(3) + s(4) == s(2));
    CHECK(s(3) * s(4) == s(2));
    CHECK(-s(2) == s(3));
    CHECK(s(1) / s(3) == s(2));  // 3*2 = 6 = 1
    CHECK(s(3).inverse() == s(2));
    CHECK(s(-1) == s(4));
    CHECK_THROWS_AS(s(0).inverse(), DivisionByZeroError);
    CHECK_THROWS_AS(s(1) / s(0), DivisionByZeroError);

    auto f2 = FieldSpec::prime(2);
    auto t = [&](long long n) { return Scalar::from_integer(f2, n); };
    CHECK(t(1) + t(1) == t(0));
    CHECK(t(1).inverse() == t(1));

    CHECK_THROWS_AS(s(1) + t(1), FieldMismatchError);
}

TEST_CASE("rational arithmetic is exact and canonical") {
    auto q = FieldSpec::rationals();
    auto frac = [&](long long a, long long b) { return Scalar::fraction(q, BigInt(a), BigInt(b)); };

    CHECK(frac(1, 2) + frac(1, 3) == frac(5, 6));
    CHECK(frac(2, 4) == frac(1, 2));    // reduced on construction
    CHECK(frac(1, -2) == frac(-1, 2));  // sign normalized
    CHECK(frac(1, 3).inverse() == frac(3, 1));
    CHECK(frac(-2, 3) * frac(3, 2) == Scalar::from_integer(q, -1));
    CHECK((frac(1, 2) - frac(1, 2)).is_zero());
    CHECK_THROWS_AS(frac(1, 0), DivisionByZeroError);
}

TEST_CASE("scalar text encoding round trips") {
    auto q = FieldSpec::rationals();
    auto f7 = FieldSpec::prime(7);

    CHECK(Scalar::fraction(q, BigInt(5), BigInt(6)).str() == "5/6");
    CHECK(Scalar::from_integer(q, 7).str() == "7");
    CHECK(Scalar::fraction(q, BigInt(-2), BigInt(3)).str() == "-2/3");
    CHECK(Scalar::from_integer(f7, 3).str() == "3");

    CHECK(Scalar::parse(q, "5/6") == Scalar::fraction(q, BigInt(5), BigInt(6)));
    CHECK(Scalar::parse(q, "-2/3") == Scalar::fraction(q, BigInt(-2), BigInt(3)));
    CHECK(Scalar::parse(q, "7") == Scalar::from_integer(q, 7));
    CHECK(Scalar::parse(f7, "12") == Scalar::from_integer(f7, 5));
    CHECK(Scalar::parse(f7, "-1") == Scalar::from_integer(f7, 6));

    CHECK_THROWS_AS(Scalar::parse(q, ""), InvalidArgumentError);
    CHECK_THROWS_AS(Scalar::parse(q, "a/b"), InvalidArgumentError);
    CHECK_THROWS_AS(Scalar::parse(f7, "1/2"), InvalidArgumentError);

    // round trip through text is the identity on canonical forms
    for (long long a = -6; a <= 6; ++a)
        for (long long b = 1; b <= 4; ++b) {
            Scalar x = Scalar::fraction(q, BigInt(a), BigInt(b));
            CHECK(Scalar::parse(q, x.str()) == x);
        }
}

TEST_CASE("field axioms hold on sampled triples") {
    std::mt19937_64 rng(20260823);
    for (FieldSpec spec : {FieldSpec::prime(2), FieldSpec::prime(7), FieldSpec::prime(65521),
                           FieldSpec::rationals()}) {
        auto sample = [&]() {
            long long n = static_cast<long long>(rng() % 2001) - 1000;
            if (spec.is_prime_field()) return Scalar::from_integer(spec, n);
            long long d = static_cast<long long>(rng() % 30) + 1;
            return Scalar::fraction(spec, BigInt(n), BigInt(d));
        };
        for (int i = 0; i < 60; ++i) {
            Scalar a = sample(), b = sample(), c = sample();
            CHECK((a + b) + c == a + (b + c));
            CHECK(a + b == b + a);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + Scalar::zero(spec) == a);
            CHECK(a * Scalar::one(spec) == a);
            CHECK((a - a).is_zero());
            if (!a.is_zero()) CHECK(a * a.inverse() == Scalar::one(spec));
        }
    }
}
