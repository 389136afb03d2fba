#pragma once

// Finite forcing conditions over an almost-disjoint family, as immutable
// values with a decidable order.
//
// The first poset pairs a finite reduced-echelon block sequence s with a
// finite set F of family member indices; a condition strengthens another by
// end-extending s, enlarging F, and adding no new intersection between <s>
// and any member already in F.  Conditions sharing s are always compatible
// (join the F parts), which is the poset's centering structure.
//
// The second poset holds a finite table assigning, to each (label, beta)
// pair, one block row per level below the condition's height.  A condition
// strengthens another by extending the table while preserving, exactly, the
// pairwise span intersections of rows that share a label.  Both extension
// operations are constructive: adding a pair copies basis rows, and raising
// the height appends fresh basis vectors above any requested bound.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "madvec/echelon.hpp"
#include "madvec/errors.hpp"
#include "madvec/extension.hpp"
#include "madvec/fuel.hpp"
#include "madvec/madlab.hpp"
#include "madvec/streams.hpp"
#include "madvec/vectors.hpp"

namespace madvec {

// ---------------------------------------------------------------------------
// The pair poset (s, F).

class MAPCondition {
public:
    static MAPCondition make(FieldSpec spec, std::vector<SparseVector> s,
                             std::set<std::size_t> F) {
        if (!is_block_sequence(s))
            throw InvalidArgumentError("condition core must be a block sequence");
        EchelonBasis::from_rows(spec, s);  // validates the echelon row shape
        MAPCondition p(spec);
        p.s_ = std::move(s);
        p.F_ = std::move(F);
        return p;
    }

    FieldSpec spec() const { return spec_; }
    const std::vector<SparseVector>& s() const { return s_; }
    const std::set<std::size_t>& F() const { return F_; }

    bool operator==(const MAPCondition& other) const {
        return s_ == other.s_ && F_ == other.F_;
    }
    bool operator!=(const MAPCondition& other) const { return !(*this == other); }

private:
    explicit MAPCondition(FieldSpec spec) : spec_(spec) {}
    FieldSpec spec_;
    std::vector<SparseVector> s_;
    std::set<std::size_t> F_;
};

namespace detail {

inline void check_map_indices(const MAPCondition& p, const ADFamily& fam) {
    for (std::size_t i : p.F())
        if (i >= fam.size())
            throw InvalidArgumentError("condition names member " + std::to_string(i) +
                                       " of a family of size " + std::to_string(fam.size()));
}

}  // namespace detail

/// q strengthens p: q.s end-extends p.s, q.F contains p.F, and for every
/// member X named by p, <q.s> meets X only inside <p.s>.  All three clauses
/// are decided exactly (the intersection by finite window checks).
inline bool map_leq(const MAPCondition& q, const MAPCondition& p, const ADFamily& fam) {
    require_same_field(q.spec(), p.spec(), "condition order");
    detail::check_map_indices(p, fam);
    detail::check_map_indices(q, fam);
    if (q.s().size() < p.s().size()) return false;
    for (std::size_t i = 0; i < p.s().size(); ++i)
        if (!(q.s()[i] == p.s()[i])) return false;
    if (!std::includes(q.F().begin(), q.F().end(), p.F().begin(), p.F().end())) return false;
    EchelonBasis qs = rref(q.spec(), q.s());
    EchelonBasis ps = rref(p.spec(), p.s());
    for (std::size_t i : p.F()) {
        Fuel::tick();
        SubspaceStream X = fam.stream(i);
        EchelonBasis overlap = span_intersect_stream(qs, X);
        for (const auto& row : overlap.rows())
            if (!ps.contains(row)) return false;
    }
    return true;
}

/// (s, F ∪ {member}): strengthening by naming one more member.  The order
/// holds trivially since s is unchanged.
inline MAPCondition map_add_member(const MAPCondition& p, std::size_t member,
                                   const ADFamily& fam) {
    if (member >= fam.size())
        throw InvalidArgumentError("member index " + std::to_string(member) +
                                   " out of range for a family of size " +
                                   std::to_string(fam.size()));
    auto F = p.F();
    F.insert(member);
    return MAPCondition::make(p.spec(), p.s(), std::move(F));
}

/// Strengthen p by one more vector: (s⌢x, F) ≤ p with x above every named
/// member's window bound and above every certified pairwise overlap, adding
/// no new intersection.  The candidate comes from the avoid-all chain over
/// the members' tails; the order relation is then verified exactly, falling
/// back to basis-vector probes when the chain candidate is rejected.
inline MAPCondition map_extend(const MAPCondition& p, const ADFamily& fam) {
    detail::check_map_indices(p, fam);
    FieldSpec spec = p.spec();
    std::size_t K = p.s().empty() ? 0 : p.s().back().max_support();
    std::size_t floor = K;
    std::vector<std::size_t> members(p.F().begin(), p.F().end());
    for (std::size_t i : members) floor = std::max(floor, g_alpha(fam, i, K));
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            floor = std::max(floor, fam.cert(members[a], members[b]).bound);

    auto accept = [&](const SparseVector& x) {
        auto s2 = p.s();
        s2.push_back(x);
        if (!is_block_sequence(s2)) return std::optional<MAPCondition>{};
        MAPCondition q = MAPCondition::make(spec, std::move(s2), p.F());
        if (!map_leq(q, p, fam)) return std::optional<MAPCondition>{};
        return std::optional<MAPCondition>{std::move(q)};
    };

    // chain candidate over the tails above the floor; span(s) meets those
    // tails trivially because s is supported at or below the floor
    std::vector<SubspaceStream> tails;
    tails.reserve(members.size());
    for (std::size_t i : members) tails.push_back(fam.stream(i).tail(floor));
    SparseVector chain_x = extend_avoiding_all(spec, tails, p.s());
    if (auto q = accept(chain_x)) return *q;
    for (std::size_t j = floor + 1; j <= floor + 1024; ++j) {
        Fuel::tick();
        if (auto q = accept(SparseVector::unit(spec, j))) return *q;
    }
    throw PreconditionError("no extension found above the window bound", floor,
                            chain_x.str());
}

// ---------------------------------------------------------------------------
// The table poset.

class QCondition {
public:
    using Pair = std::pair<std::string, std::size_t>;  // (label, beta)
    using Table = std::map<Pair, std::vector<SparseVector>>;

    static QCondition make(FieldSpec spec, std::size_t height, Table table) {
        for (const auto& [key, row] : table) {
            if (key.first.empty() || key.first.find(',') != std::string::npos)
                throw InvalidArgumentError("label '" + key.first +
                                           "' must be nonempty and comma-free");
            if (row.size() != height)
                throw InvalidArgumentError("row for (" + key.first + "," +
                                           std::to_string(key.second) + ") has " +
                                           std::to_string(row.size()) + " levels, expected " +
                                           std::to_string(height));
            if (!is_block_sequence(row))
                throw InvalidArgumentError("row for (" + key.first + "," +
                                           std::to_string(key.second) +
                                           ") is not a block sequence");
        }
        QCondition p(spec);
        p.height_ = height;
        p.table_ = std::move(table);
        return p;
    }

    FieldSpec spec() const { return spec_; }
    std::size_t height() const { return height_; }
    const Table& table() const { return table_; }

    std::vector<Pair> pairs() const {
        std::vector<Pair> out;
        for (const auto& [key, row] : table_) out.push_back(key);
        return out;
    }

    bool has_pair(const Pair& key) const { return table_.count(key) > 0; }

    const std::vector<SparseVector>& row(const Pair& key) const {
        auto it = table_.find(key);
        if (it == table_.end())
            throw InvalidArgumentError("no row for (" + key.first + "," +
                                       std::to_string(key.second) + ")");
        return it->second;
    }

    bool operator==(const QCondition& other) const {
        return height_ == other.height_ && table_ == other.table_;
    }
    bool operator!=(const QCondition& other) const { return !(*this == other); }

private:
    explicit QCondition(FieldSpec spec) : spec_(spec) {}
    FieldSpec spec_;
    std::size_t height_ = 0;
    Table table_;
};

/// q strengthens p: q's table extends p's (same rows below p's height) and,
/// for every label and distinct betas present in p, the span intersection of
/// the two full q rows equals that of the two p rows — the overlap gained by
/// the new levels is exactly nothing.  Decided exactly; the quantifier runs
/// over the pairs of p only.
inline bool q_leq(const QCondition& q, const QCondition& p) {
    require_same_field(q.spec(), p.spec(), "condition order");
    if (q.height() < p.height()) return false;
    for (const auto& [key, row] : p.table()) {
        if (!q.has_pair(key)) return false;
        const auto& qrow = q.row(key);
        for (std::size_t i = 0; i < p.height(); ++i)
            if (!(qrow[i] == row[i])) return false;
    }
    for (const auto& [bkey, brow] : p.table())
        for (const auto& [ckey, crow] : p.table()) {
            if (bkey.first != ckey.first || bkey.second >= ckey.second) continue;
            Fuel::tick();
            EchelonBasis now = intersect(rref(q.spec(), q.row(bkey)), rref(q.spec(), q.row(ckey)));
            EchelonBasis before = intersect(rref(p.spec(), brow), rref(p.spec(), crow));
            if (!(now == before)) return false;
        }
    return true;
}

/// Add one (label, beta) pair, filling its row with the first `height` basis
/// rows of E.  Any block sequence would do; basis rows keep the result
/// deterministic.  The new pair is unconstrained by the order (the
/// intersection clause only quantifies over pairs of the weaker condition),
/// and the strengthening is verified before returning.
inline QCondition q_add_pair(const QCondition& p, const QCondition::Pair& pair) {
    if (p.has_pair(pair))
        throw InvalidArgumentError("pair (" + pair.first + "," + std::to_string(pair.second) +
                                   ") already present");
    auto table = p.table();
    std::vector<SparseVector> row;
    row.reserve(p.height());
    for (std::size_t i = 0; i < p.height(); ++i)
        row.push_back(SparseVector::unit(p.spec(), i));
    table[pair] = std::move(row);
    QCondition q = QCondition::make(p.spec(), p.height(), std::move(table));
    if (!q_leq(q, p))
        throw PreconditionError("adding a pair failed to strengthen the condition", 0,
                                pair.first);
    return q;
}

/// Raise the height by one, assigning each pair a fresh basis vector above
/// both M and everything already in the table.  One sweep in label order
/// hands out strictly increasing coordinates, so the new vectors are block
/// above their rows, pairwise independent, and meet no finite span already
/// present — every pairwise intersection is preserved exactly.  Verified by
/// q_leq before returning.
inline QCondition q_extend_level(const QCondition& p, std::size_t M) {
    std::size_t top = M;
    for (const auto& [key, row] : p.table())
        for (const auto& v : row) top = std::max(top, v.max_support());
    auto table = p.table();
    std::size_t next = top + 1;
    for (auto& [key, row] : table) {
        Fuel::tick();
        row.push_back(SparseVector::unit(p.spec(), next++));
    }
    QCondition q = QCondition::make(p.spec(), p.height() + 1, std::move(table));
    if (!q_leq(q, p))
        throw PreconditionError("raising the height failed to strengthen the condition", M,
                                std::to_string(p.height()));
    return q;
}

}  // namespace madvec
