#include <catch2/catch_amalgamated.hpp>

#include "madvec/streams.hpp"
#include "oracle.hpp"

using namespace madvec;
namespace mt = madvec::testing;

namespace {
const FieldSpec f2 = FieldSpec::prime(2);
const FieldSpec f3 = FieldSpec::prime(3);

SparseVector vec(FieldSpec spec, std::initializer_list<std::pair<std::size_t, long long>> es) {
    std::vector<SparseVector::Entry> entries;
    for (auto& [i, c] : es) entries.emplace_back(i, Scalar::from_integer(spec, c));
    return SparseVector::make(spec, std::move(entries));
}

SparseVector e(FieldSpec spec, std::size_t n) { return SparseVector::unit(spec, n); }

struct FuelGuard {
    FuelGuard() { Fuel::reset(Fuel::kDefaultBudget); }
    ~FuelGuard() { Fuel::reset(Fuel::kDefaultBudget); }
};
}  // namespace

TEST_CASE("diagonal residue streams") {
    auto evens = make_stream(Preset::diagonal_residue(0, 2), f2);
    CHECK(evens.row(0) == e(f2, 0));
    CHECK(evens.row(1) == e(f2, 2));
    CHECK(evens.row(5) == e(f2, 10));

    auto odds = make_stream(Preset::diagonal_residue(1, 2), f2);
    CHECK(odds.row(0) == e(f2, 1));
    CHECK(odds.row(3) == e(f2, 7));

    CHECK_THROWS_AS(Preset::diagonal_residue(2, 2), InvalidArgumentError);
    CHECK_THROWS_AS(Preset::diagonal_residue(0, 0), InvalidArgumentError);
}

TEST_CASE("val2 index-set streams partition the coordinates") {
    auto s0 = make_stream(Preset::diagonal_indexset("val2", 0), f2);
    CHECK(s0.row(0) == e(f2, 0));
    CHECK(s0.row(1) == e(f2, 2));
    CHECK(s0.row(2) == e(f2, 4));
    auto s1 = make_stream(Preset::diagonal_indexset("val2", 1), f2);
    CHECK(s1.row(0) == e(f2, 1));
    CHECK(s1.row(1) == e(f2, 5));
    CHECK(s1.row(2) == e(f2, 9));
    auto s2 = make_stream(Preset::diagonal_indexset("val2", 2), f2);
    CHECK(s2.row(0) == e(f2, 3));
    CHECK(s2.row(1) == e(f2, 11));

    // the sets {j : val2(j+1) = k} for k = 0..3 tile an initial segment
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k <= 3; ++k) {
        auto s = make_stream(Preset::diagonal_indexset("val2", k), f2);
        for (std::size_t i = 0; i < 8; ++i) seen.insert(s.row(i).min_support());
    }
    for (std::size_t j = 0; j < 15; ++j) CHECK(seen.count(j) == 1);

    CHECK_THROWS_AS(Preset::diagonal_indexset("val3", 0), InvalidArgumentError);
}

TEST_CASE("pattern streams") {
    auto pairs = make_stream(Preset::pattern(2, {{0, "1"}, {1, "1"}}), f2);
    CHECK(pairs.row(0) == vec(f2, {{0, 1}, {1, 1}}));
    CHECK(pairs.row(1) == vec(f2, {{2, 1}, {3, 1}}));
    CHECK(pairs.row(4) == vec(f2, {{8, 1}, {9, 1}}));

    // leading coefficient normalizes to 1: (2,1) over GF(3) becomes (1,2)
    auto norm = make_stream(Preset::pattern(2, {{0, "2"}, {1, "1"}}), f3);
    CHECK(norm.row(0) == vec(f3, {{0, 1}, {1, 2}}));

    // sparse pattern inside a wide window
    auto wide = make_stream(Preset::pattern(4, {{1, "1"}, {3, "2"}}), f3);
    CHECK(wide.row(0) == vec(f3, {{1, 1}, {3, 2}}));
    CHECK(wide.row(1) == vec(f3, {{5, 1}, {7, 2}}));

    CHECK_THROWS_AS(Preset::pattern(2, {{0, "1"}, {2, "1"}}), InvalidArgumentError);
    CHECK_THROWS_AS(Preset::pattern(2, {{1, "1"}, {0, "1"}}), InvalidArgumentError);
    CHECK_THROWS_AS(Preset::pattern(2, {}), InvalidArgumentError);
    auto zero_coeff = Preset::pattern(2, {{0, "0"}, {1, "1"}});
    CHECK_THROWS_AS(make_stream(zero_coeff, f2), InvalidArgumentError);
}

TEST_CASE("perfect branch streams") {
    // leftmost branch: codes 0, 1, 3, 7, 15 (all-zero bits)
    auto left = make_stream(Preset::perfect_branch("0"), f2);
    CHECK(left.row(0) == e(f2, 0));
    CHECK(left.row(1) == e(f2, 1));
    CHECK(left.row(2) == e(f2, 3));
    CHECK(left.row(3) == e(f2, 7));
    CHECK(left.row(4) == e(f2, 15));

    // rightmost branch: codes 0, 2, 6, 14
    auto right = make_stream(Preset::perfect_branch("1"), f2);
    CHECK(right.row(1) == e(f2, 2));
    CHECK(right.row(2) == e(f2, 6));
    CHECK(right.row(3) == e(f2, 14));

    // alternating branch 0,1,0,...: prefix values 0, 01, 010 -> codes 1, 4, 9
    auto alt = make_stream(Preset::perfect_branch("01"), f2);
    CHECK(alt.row(1) == e(f2, 1));
    CHECK(alt.row(2) == e(f2, 4));
    CHECK(alt.row(3) == e(f2, 9));

    // two branches agreeing on a prefix share exactly those rows
    auto b1 = make_stream(Preset::perfect_branch("0010"), f2);
    auto b2 = make_stream(Preset::perfect_branch("0011"), f2);
    CHECK(b1.row(0) == b2.row(0));
    CHECK(b1.row(1) == b2.row(1));
    CHECK(b1.row(2) == b2.row(2));
    CHECK(b1.row(3) == b2.row(3));  // prefixes of length 3 still agree
    CHECK(b1.row(4) != b2.row(4));  // first divergent bit

    CHECK_THROWS_AS(Preset::perfect_branch(""), InvalidArgumentError);
    CHECK_THROWS_AS(Preset::perfect_branch("012"), InvalidArgumentError);
}

TEST_CASE("windows and membership") {
    auto evens = make_stream(Preset::diagonal_residue(0, 2), f2);
    auto W = evens.rows_until_pivot_exceeds(3);
    REQUIRE(W.dim() == 2);
    CHECK(W.rows()[0] == e(f2, 0));
    CHECK(W.rows()[1] == e(f2, 2));

    CHECK(stream_member(vec(f2, {{0, 1}, {2, 1}}), evens));
    CHECK(stream_member(SparseVector(f2), evens));
    CHECK_FALSE(stream_member(vec(f2, {{0, 1}, {1, 1}}), evens));

    auto pairs = make_stream(Preset::pattern(2, {{0, "1"}, {1, "1"}}), f2);
    CHECK(stream_member(vec(f2, {{0, 1}, {1, 1}, {2, 1}, {3, 1}}), pairs));
    CHECK_FALSE(stream_member(vec(f2, {{0, 1}, {1, 1}, {2, 1}}), pairs));

    // member agrees with the brute-force span over a finite window
    auto win = pairs.rows_until_pivot_exceeds(9);
    for (const auto& v : mt::span_enumerate(f2, win.rows())) {
        auto fresh = pairs.fork();
        CHECK(stream_member(v, fresh));
    }
}

TEST_CASE("prefixes are canonical bases") {
    auto pairs = make_stream(Preset::pattern(2, {{0, "1"}, {1, "1"}}), f3);
    auto P = pairs.prefix(4);
    CHECK(P.dim() == 4);
    CHECK(P.pivot(3) == 6);
}

TEST_CASE("tail streams") {
    auto evens = make_stream(Preset::diagonal_residue(0, 2), f2);
    auto t = evens.tail(3);
    CHECK(t.row(0) == e(f2, 4));
    CHECK(t.row(1) == e(f2, 6));

    // tails of tails collapse to the larger cutoff
    auto tt = t.tail(1);
    CHECK(tt.row(0) == e(f2, 4));
    auto tt2 = t.tail(9);
    CHECK(tt2.row(0) == e(f2, 10));

    // cutting at a pivot keeps vectors strictly above it
    auto pairs = make_stream(Preset::pattern(2, {{0, "1"}, {1, "1"}}), f2);
    auto pt = pairs.tail(0);
    CHECK(pt.row(0) == vec(f2, {{2, 1}, {3, 1}}));
}

TEST_CASE("canonicalize settles rows as the support floor rises") {
    FuelGuard fuel;
    // raw input e1, e0+e1, e1 again, then e2, e3, ...; canonical rows e0, e1, e2, ...
    auto factory = [](FieldSpec spec) -> ProducerFactory {
        return [spec]() -> std::unique_ptr<RawProducer> {
            auto gen = [spec](std::size_t pos) -> std::optional<SparseVector> {
                if (pos == 0) return SparseVector::unit(spec, 1);
                if (pos == 1) return SparseVector::make(
                        spec, {{0, Scalar::one(spec)}, {1, Scalar::one(spec)}});
                if (pos == 2) return SparseVector::unit(spec, 1);
                return SparseVector::unit(spec, pos - 1);
            };
            auto floor = [](std::size_t pos) -> std::size_t {
                if (pos <= 1) return 0;
                if (pos == 2) return 1;
                return pos - 1;
            };
            return std::make_unique<GeneratorProducer>(gen, floor);
        };
    };
    auto s = canonicalize(f2, "mixed", factory);
    CHECK(s.row(0) == e(f2, 0));
    CHECK(s.row(1) == e(f2, 1));
    CHECK(s.row(2) == e(f2, 2));
    CHECK(s.row(3) == e(f2, 3));

    // identity on an already canonical block input
    auto ident = canonicalize(f2, "ident", [](FieldSpec spec) -> ProducerFactory {
        return [spec]() -> std::unique_ptr<RawProducer> {
            return std::make_unique<GeneratorProducer>(
                [spec](std::size_t pos) -> std::optional<SparseVector> {
                    return SparseVector::make(
                        spec, {{2 * pos, Scalar::one(spec)}, {2 * pos + 1, Scalar::one(spec)}});
                },
                [](std::size_t pos) { return 2 * pos; });
        };
    });
    CHECK(ident.row(0) == vec(f2, {{0, 1}, {1, 1}}));
    CHECK(ident.row(2) == vec(f2, {{4, 1}, {5, 1}}));

    // replay: a fork yields identical rows
    auto s2 = s.fork();
    for (std::size_t i = 0; i < 4; ++i) CHECK(s2.row(i) == s.row(i));
}

TEST_CASE("canonicalize of finite input raises a distinct error") {
    FuelGuard fuel;
    auto s = canonicalize(f2, "finite", [](FieldSpec spec) -> ProducerFactory {
        return [spec]() -> std::unique_ptr<RawProducer> {
            return std::make_unique<VectorListProducer>(
                spec, std::vector<SparseVector>{SparseVector::unit(spec, 0)});
        };
    });
    CHECK(s.row(0) == e(f2, 0));  // the one spanned dimension is fine
    CHECK_THROWS_AS(s.row(1), FiniteInputError);

    // dependent inputs span even less than they look
    auto s2 = canonicalize(f2, "dependent", [](FieldSpec spec) -> ProducerFactory {
        return [spec]() -> std::unique_ptr<RawProducer> {
            std::vector<SparseVector> vs = {
                SparseVector::make(spec, {{0, Scalar::one(spec)}, {1, Scalar::one(spec)}}),
                SparseVector::unit(spec, 1)};
            return std::make_unique<VectorListProducer>(spec, std::move(vs));
        };
    });
    CHECK(s2.row(0) == e(f2, 0));
    CHECK(s2.row(1) == e(f2, 1));
    CHECK_THROWS_AS(s2.row(2), FiniteInputError);
}

TEST_CASE("stream invariant violations fail loudly") {
    FuelGuard fuel;
    // pivots must strictly increase
    auto bad1 = make_stream(
        Preset::block_generator("repeat-e0",
                                [](FieldSpec spec, std::size_t) {
                                    return SparseVector::unit(spec, 0);
                                }),
        f2);
    CHECK_NOTHROW(bad1.row(0));
    CHECK_THROWS_AS(bad1.row(1), StreamInvariantError);

    // rows must be mutually reduced: e0+e1 then e1+e2 leaves pivot 1 dirty
    auto bad2 = make_stream(
        Preset::block_generator("overlap",
                                [](FieldSpec spec, std::size_t n) {
                                    return SparseVector::make(
                                        spec, {{n, Scalar::one(spec)},
                                               {n + 1, Scalar::one(spec)}});
                                }),
        f2);
    CHECK_NOTHROW(bad2.row(0));
    CHECK_THROWS_AS(bad2.row(1), StreamInvariantError);

    // a valid block generator passes and is normalized
    auto good = make_stream(
        Preset::block_generator("scaled-blocks",
                                [](FieldSpec spec, std::size_t n) {
                                    return SparseVector::make(
                                        spec, {{2 * n, Scalar::from_integer(spec, 2)},
                                               {2 * n + 1, Scalar::one(spec)}});
                                }),
        f3);
    CHECK(good.row(0) == vec(f3, {{0, 1}, {1, 2}}));  // scaled by 2^{-1} = 2
}

TEST_CASE("fuel budget cuts off runaway searches") {
    Fuel::reset(40);
    auto evens = make_stream(Preset::diagonal_residue(0, 2), f2);
    auto far = evens.tail(1000);  // needs > 500 raw pulls before the first row
    CHECK_THROWS_AS(far.row(0), FuelExhaustedError);
    Fuel::reset(Fuel::kDefaultBudget);
    auto far2 = make_stream(Preset::diagonal_residue(0, 2), f2).tail(1000);
    CHECK(far2.row(0) == e(f2, 502 * 2 - 2));
}
