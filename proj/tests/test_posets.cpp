#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "madvec/posets.hpp"
#include "oracle.hpp"

using namespace madvec;

namespace {
const FieldSpec f2 = FieldSpec::prime(2);
const FieldSpec f3 = FieldSpec::prime(3);

SparseVector vec(FieldSpec spec, std::initializer_list<std::pair<std::size_t, long long>> es) {
    std::vector<SparseVector::Entry> entries;
    for (auto& [i, c] : es) entries.emplace_back(i, Scalar::from_integer(spec, c));
    return SparseVector::make(spec, std::move(entries));
}

SparseVector e(FieldSpec spec, std::size_t n) { return SparseVector::unit(spec, n); }

ADFamily residue_family(std::size_t m, std::size_t depth = 12) {
    std::vector<Preset> ps;
    for (std::size_t r = 0; r < m; ++r) ps.push_back(Preset::diagonal_residue(r, m));
    return ADFamily::certified(f2, std::move(ps), depth);
}

ADFamily triple_family(std::size_t depth = 12) {
    return ADFamily::certified(f2,
                               {Preset::diagonal_residue(0, 2), Preset::diagonal_residue(1, 2),
                                Preset::pattern(2, {{0, "1"}, {1, "1"}})},
                               depth);
}

QCondition two_pair(FieldSpec spec) {
    QCondition::Table t;
    t[{"a", 0}] = {e(spec, 0)};
    t[{"a", 1}] = {e(spec, 1)};
    return QCondition::make(spec, 1, std::move(t));
}
}  // namespace

TEST_CASE("pair-condition validation and order") {
    auto fam = residue_family(2);
    auto p = MAPCondition::make(f2, {e(f2, 0)}, {0});

    CHECK_THROWS_AS(MAPCondition::make(f2, {e(f2, 2), e(f2, 1)}, {}), InvalidArgumentError);
    CHECK_THROWS_AS(MAPCondition::make(f2, {e(f2, 0) + e(f2, 2), e(f2, 2)}, {}),
                    InvalidArgumentError);  // block but not mutually reduced

    // extending s by a vector meeting the member only inside <s> is allowed
    auto q = MAPCondition::make(f2, {e(f2, 0), vec(f2, {{1, 1}, {2, 1}})}, {0});
    CHECK(map_leq(q, p, fam));
    // ... but absorbing a fresh member vector is not
    auto q2 = MAPCondition::make(f2, {e(f2, 0), e(f2, 2)}, {0});
    CHECK_FALSE(map_leq(q2, p, fam));

    CHECK(map_leq(p, p, fam));  // reflexive
    CHECK_FALSE(map_leq(p, q, fam));
    // dropping a member or rewriting the core breaks the order
    auto fewer = MAPCondition::make(f2, {e(f2, 0), vec(f2, {{1, 1}, {2, 1}})}, {});
    CHECK_FALSE(map_leq(fewer, p, fam));
    auto other = MAPCondition::make(f2, {e(f2, 1)}, {0});
    CHECK_FALSE(map_leq(other, p, fam));

    auto bad = MAPCondition::make(f2, {}, {9});
    CHECK_THROWS_AS(map_leq(bad, p, fam), InvalidArgumentError);
}

TEST_CASE("map_add_member strengthens trivially") {
    auto fam = residue_family(2);
    auto p = MAPCondition::make(f2, {}, {});
    auto q = map_add_member(p, 0, fam);
    CHECK(q.F() == std::set<std::size_t>{0});
    CHECK(q.s().empty());
    CHECK(map_leq(q, p, fam));
    CHECK(map_add_member(q, 0, fam) == q);  // idempotent
    CHECK_THROWS_AS(map_add_member(p, 5, fam), InvalidArgumentError);

    // extension after adding a member avoids it
    auto r = map_extend(map_add_member(q, 1, fam), fam);
    REQUIRE(r.s().size() == 1);
    EchelonBasis span = rref(f2, r.s());
    for (std::size_t i : {0, 1}) {
        auto y = fam.stream(i);
        CHECK(span_intersect_stream(span, y).dim() == 0);
    }
}

TEST_CASE("map_extend lengthens the core while preserving the order") {
    auto fam = residue_family(2);

    // nothing to avoid: the first basis vector
    auto p0 = MAPCondition::make(f2, {}, {});
    CHECK(map_extend(p0, fam).s() == std::vector<SparseVector>{e(f2, 0)});

    // avoiding both diagonals needs a mixed vector
    auto p = MAPCondition::make(f2, {}, {0, 1});
    auto q = map_extend(p, fam);
    CHECK(q.s() == std::vector<SparseVector>{vec(f2, {{2, 1}, {3, 1}})});
    CHECK(map_leq(q, p, fam));

    // ten iterations over the mixed three-member family, each step verified
    auto tri = triple_family(16);
    auto cond = MAPCondition::make(f2, {}, {0, 1, 2});
    std::vector<MAPCondition> chain = {cond};
    for (int step = 0; step < 10; ++step) {
        auto next = map_extend(chain.back(), tri);
        CHECK(next.s().size() == chain.back().s().size() + 1);
        CHECK(map_leq(next, chain.back(), tri));
        chain.push_back(std::move(next));
    }
    // transitivity along the generated chain
    for (std::size_t i = 0; i < chain.size(); i += 3)
        for (std::size_t j = i + 1; j < chain.size(); j += 2)
            CHECK(map_leq(chain[j], chain[i], tri));
}

TEST_CASE("conditions sharing a core are compatible") {
    auto fam = residue_family(4);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        // random shared core: extend a few times from a random member set
        std::set<std::size_t> F1, F2;
        for (std::size_t m = 0; m < 4; ++m) {
            if (rng() & 1) F1.insert(m);
            if (rng() & 1) F2.insert(m);
        }
        auto base = MAPCondition::make(f2, {}, std::set<std::size_t>{});
        for (int k = rng() % 3; k-- > 0;) base = map_extend(base, fam);
        auto p1 = MAPCondition::make(f2, base.s(), F1);
        auto p2 = MAPCondition::make(f2, base.s(), F2);
        std::set<std::size_t> FU;
        FU.insert(F1.begin(), F1.end());
        FU.insert(F2.begin(), F2.end());
        auto join = MAPCondition::make(f2, base.s(), FU);
        CHECK(map_leq(join, p1, fam));
        CHECK(map_leq(join, p2, fam));
    }
}

TEST_CASE("table-condition validation") {
    QCondition::Table t;
    t[{"a", 0}] = {e(f2, 0), e(f2, 1)};
    CHECK_THROWS_AS(QCondition::make(f2, 1, t), InvalidArgumentError);  // wrong length
    QCondition::Table t2;
    t2[{"a", 0}] = {e(f2, 1), e(f2, 0)};
    CHECK_THROWS_AS(QCondition::make(f2, 2, t2), InvalidArgumentError);  // not block
    QCondition::Table t3;
    t3[{"a,b", 0}] = {e(f2, 0)};
    CHECK_THROWS_AS(QCondition::make(f2, 1, t3), InvalidArgumentError);  // comma label
    QCondition::Table t4;
    t4[{"", 0}] = {e(f2, 0)};
    CHECK_THROWS_AS(QCondition::make(f2, 1, t4), InvalidArgumentError);

    auto p = two_pair(f2);
    CHECK(p.height() == 1);
    CHECK(p.pairs() == std::vector<QCondition::Pair>{{"a", 0}, {"a", 1}});
    CHECK_THROWS_AS(p.row({"z", 9}), InvalidArgumentError);
}

TEST_CASE("q_leq preserves pairwise intersections exactly") {
    auto p = two_pair(f2);

    QCondition::Table ext;
    ext[{"a", 0}] = {e(f2, 0), e(f2, 2)};
    ext[{"a", 1}] = {e(f2, 1), e(f2, 3)};
    auto q = QCondition::make(f2, 2, ext);
    CHECK(q_leq(q, p));

    // both rows absorbing e_2 creates a new nontrivial intersection
    QCondition::Table bad;
    bad[{"a", 0}] = {e(f2, 0), e(f2, 2)};
    bad[{"a", 1}] = {e(f2, 1), e(f2, 2)};
    CHECK_FALSE(q_leq(QCondition::make(f2, 2, bad), p));
    // overlapping supports that cannot cancel keep the intersection trivial
    QCondition::Table ok2;
    ok2[{"a", 0}] = {e(f2, 0), e(f2, 2)};
    ok2[{"a", 1}] = {e(f2, 1), vec(f2, {{2, 1}, {4, 1}})};
    CHECK(q_leq(QCondition::make(f2, 2, ok2), p));
    CHECK(q_leq(p, p));

    // rewriting an existing level breaks table extension
    QCondition::Table rew;
    rew[{"a", 0}] = {e(f2, 4), e(f2, 5)};
    rew[{"a", 1}] = {e(f2, 1), e(f2, 6)};
    CHECK_FALSE(q_leq(QCondition::make(f2, 2, rew), p));

    // dropping a pair breaks it too
    QCondition::Table drop;
    drop[{"a", 0}] = {e(f2, 0), e(f2, 2)};
    CHECK_FALSE(q_leq(QCondition::make(f2, 2, drop), p));
}

TEST_CASE("q_add_pair copies basis rows and strengthens") {
    auto p = two_pair(f2);
    auto q = q_add_pair(p, {"a", 2});
    CHECK(q.pairs().size() == 3);
    CHECK(q.row({"a", 2}) == std::vector<SparseVector>{e(f2, 0)});
    CHECK(q_leq(q, p));

    // a fresh label imposes no intersection constraint against "a"
    auto q2 = q_add_pair(q, {"b", 0});
    CHECK(q_leq(q2, q));
    CHECK(q_leq(q2, p));

    // empty condition gains its first row
    auto empty = QCondition::make(f2, 2, {});
    auto first = q_add_pair(empty, {"c", 1});
    CHECK(first.row({"c", 1}) == std::vector<SparseVector>{e(f2, 0), e(f2, 1)});

    CHECK_THROWS_AS(q_add_pair(p, {"a", 0}), InvalidArgumentError);
}

TEST_CASE("q_extend_level appends fresh vectors above the bound") {
    auto p = two_pair(f2);
    auto q = q_extend_level(p, 5);
    CHECK(q.height() == 2);
    CHECK(q.row({"a", 0}) == std::vector<SparseVector>{e(f2, 0), e(f2, 6)});
    CHECK(q.row({"a", 1}) == std::vector<SparseVector>{e(f2, 1), e(f2, 7)});
    for (const auto& key : q.pairs()) CHECK(q.row(key).back().min_support() > 5);
    CHECK(q_leq(q, p));

    // single pair, M = 0
    QCondition::Table t;
    t[{"a", 0}] = {e(f2, 0)};
    auto solo = QCondition::make(f2, 1, std::move(t));
    CHECK(q_extend_level(solo, 0).row({"a", 0}) ==
          std::vector<SparseVector>{e(f2, 0), e(f2, 1)});

    // three betas with nontrivial pairwise intersections, preserved exactly
    QCondition::Table t3;
    t3[{"a", 0}] = {vec(f2, {{0, 1}, {1, 1}}), vec(f2, {{2, 1}, {3, 1}})};
    t3[{"a", 1}] = {vec(f2, {{0, 1}, {1, 1}, {2, 1}, {3, 1}}), e(f2, 4)};
    t3[{"a", 2}] = {vec(f2, {{0, 1}, {1, 1}}), vec(f2, {{4, 1}, {5, 1}})};
    auto deep = QCondition::make(f2, 2, std::move(t3));
    auto before01 = intersect(rref(f2, deep.row({"a", 0})), rref(f2, deep.row({"a", 1})));
    CHECK(before01.dim() == 1);
    auto ext = q_extend_level(deep, 0);
    CHECK(q_leq(ext, deep));
    auto after01 = intersect(rref(f2, ext.row({"a", 0})), rref(f2, ext.row({"a", 1})));
    CHECK(after01 == before01);
    // and over GF(3) as well
    QCondition::Table g3;
    g3[{"a", 0}] = {vec(f3, {{0, 1}, {1, 2}})};
    g3[{"a", 1}] = {vec(f3, {{0, 2}, {1, 1}})};
    auto p3 = QCondition::make(f3, 1, std::move(g3));
    CHECK(q_leq(q_extend_level(p3, 3), p3));
}

TEST_CASE("generated chains behave like a partial order") {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 40; ++trial) {
        // random starting condition: a few labels, a few betas, height 1-2
        QCondition::Table t;
        std::size_t height = 1 + rng() % 2;
        for (std::size_t li = 0; li < 1 + rng() % 2; ++li)
            for (std::size_t b = 0; b < 1 + rng() % 3; ++b) {
                std::vector<SparseVector> row;
                std::size_t base = rng() % 3;
                for (std::size_t i = 0; i < height; ++i) {
                    row.push_back(rng() % 2 ? e(f2, base)
                                            : e(f2, base) + e(f2, base + 1));
                    base += 2 + rng() % 2;
                }
                t[{std::string(1, char('a' + li)), b}] = std::move(row);
            }
        auto p0 = QCondition::make(f2, height, std::move(t));
        auto p1 = (rng() & 1) ? q_extend_level(p0, rng() % 8)
                              : q_add_pair(p0, {"z", rng() % 4});
        auto p2 = q_extend_level(p1, rng() % 8);
        CHECK(q_leq(p0, p0));
        CHECK(q_leq(p1, p0));
        CHECK(q_leq(p2, p1));
        CHECK(q_leq(p2, p0));  // transitivity along the chain
        // antisymmetry: mutual order forces equality
        CHECK_FALSE(q_leq(p0, p2));
        auto copy = p2;
        CHECK((q_leq(copy, p2) && q_leq(p2, copy)));
        CHECK(copy == p2);
    }
}
