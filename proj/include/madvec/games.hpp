#pragma once

// Two infinite games on a subspace stream X, truncated at a round count.
//
// In the first game, player I offers a subspace presentation each round
// (every row a member of X) and player II answers with a vector of the
// offered span; in the second, player I names a natural number and player II
// answers with a member of X supported entirely above it.  In both games
// II's answers must climb in block order, and the outcome is the sequence of
// II's vectors.  Every move is validated by the engine as it is played, and
// a finished transcript can be re-validated from scratch by a pure replay
// function.
//
// Strategies are deterministic functions of the transcript prefix.  The
// built-in strategies pin a family of subspaces: one drives II's vectors
// into scheduled members, the other pair keeps the whole outcome inside a
// single chosen member.

#include <cstddef>
#include <functional>
#include <optional>
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

enum class GameKind { Gowers, Asymptotic };

inline const char* game_kind_name(GameKind k) {
    return k == GameKind::Gowers ? "gowers" : "asymptotic";
}

/// One alternation.  For the subspace game, `offered` holds the rows of I's
/// presentation that II actually inspected (the finite record of an infinite
/// move); `bound` is unused.  For the asymptotic game, `bound` holds I's
/// natural number and `offered` stays empty.
struct RoundRecord {
    std::vector<SparseVector> offered;
    std::size_t bound;
    SparseVector reply;
};

class GameTranscript {
public:
    GameTranscript(GameKind kind, FieldSpec spec, Preset arena)
        : kind_(kind), spec_(spec), arena_(std::move(arena)) {}

    GameKind kind() const { return kind_; }
    FieldSpec spec() const { return spec_; }
    const Preset& arena() const { return arena_; }
    const std::vector<RoundRecord>& rounds() const { return rounds_; }

    /// The block sequence of II's vectors.
    std::vector<SparseVector> outcome() const {
        std::vector<SparseVector> out;
        out.reserve(rounds_.size());
        for (const auto& r : rounds_) out.push_back(r.reply);
        return out;
    }

    void append(RoundRecord r) { rounds_.push_back(std::move(r)); }

private:
    GameKind kind_;
    FieldSpec spec_;
    Preset arena_;
    std::vector<RoundRecord> rounds_;
};

/// Player I's strategy: either a subspace offer (first game) or a natural
/// number (second game), computed from the transcript prefix.
class StrategyI {
public:
    using Offer = std::function<SubspaceStream(const GameTranscript&)>;
    using Bound = std::function<std::size_t(const GameTranscript&)>;

    static StrategyI offers(Offer f) {
        StrategyI s;
        s.kind_ = GameKind::Gowers;
        s.offer_ = std::move(f);
        return s;
    }

    static StrategyI bounds(Bound f) {
        StrategyI s;
        s.kind_ = GameKind::Asymptotic;
        s.bound_ = std::move(f);
        return s;
    }

    GameKind kind() const { return kind_; }
    SubspaceStream offer(const GameTranscript& t) const { return offer_(t); }
    std::size_t bound(const GameTranscript& t) const { return bound_(t); }

private:
    StrategyI() = default;
    GameKind kind_ = GameKind::Gowers;
    Offer offer_;
    Bound bound_;
};

/// Player II's strategy: a vector of the offered span (first game) or a
/// member of the arena above the bound (second game).  In the first game II
/// receives the offered stream and pulls as many rows as it needs; exactly
/// those rows become the permanent record of I's move.
class StrategyII {
public:
    using GowersReply = std::function<SparseVector(const GameTranscript&, SubspaceStream&)>;
    using AsymptoticReply = std::function<SparseVector(const GameTranscript&, std::size_t)>;

    static StrategyII in_offer(GowersReply f) {
        StrategyII s;
        s.kind_ = GameKind::Gowers;
        s.gowers_ = std::move(f);
        return s;
    }

    static StrategyII above(AsymptoticReply f) {
        StrategyII s;
        s.kind_ = GameKind::Asymptotic;
        s.asymptotic_ = std::move(f);
        return s;
    }

    GameKind kind() const { return kind_; }
    SparseVector reply(const GameTranscript& t, SubspaceStream& offer) const {
        return gowers_(t, offer);
    }
    SparseVector reply(const GameTranscript& t, std::size_t bound) const {
        return asymptotic_(t, bound);
    }

private:
    StrategyII() = default;
    GameKind kind_ = GameKind::Gowers;
    GowersReply gowers_;
    AsymptoticReply asymptotic_;
};

namespace detail {

inline void check_reply_order(const GameTranscript& t, const SparseVector& y, std::size_t k) {
    if (y.is_zero())
        throw IllegalMoveError("player II played the zero vector", 2, k);
    if (!t.rounds().empty() && !block_lt(t.rounds().back().reply, y))
        throw IllegalMoveError("player II broke the block ordering: " + y.str() +
                                   " does not lie above " + t.rounds().back().reply.str(),
                               2, k);
}

}  // namespace detail

/// Run `rounds` alternations of the chosen game on arena X, validating every
/// move.  Violations raise IllegalMoveError naming the player and the round.
inline GameTranscript play(GameKind kind, SubspaceStream& X, const StrategyI& strat_I,
                           const StrategyII& strat_II, std::size_t rounds) {
    if (strat_I.kind() != kind)
        throw InvalidArgumentError("player I strategy is for the wrong game kind");
    if (strat_II.kind() != kind)
        throw InvalidArgumentError("player II strategy is for the wrong game kind");
    GameTranscript t(kind, X.spec(), X.preset());
    for (std::size_t k = 0; k < rounds; ++k) {
        Fuel::tick();
        if (kind == GameKind::Gowers) {
            SubspaceStream offer = strat_I.offer(t);
            require_same_field(offer.spec(), X.spec(), "game offer");
            SparseVector y = [&] {
                try {
                    return strat_II.reply(t, offer);
                } catch (const StreamInvariantError& err) {
                    // the offered presentation itself broke: I's fault
                    throw IllegalMoveError(std::string("player I offered a malformed "
                                                       "subspace presentation: ") +
                                               err.what(),
                                           1, k);
                }
            }();
            std::vector<SparseVector> seen;
            seen.reserve(offer.produced());
            for (std::size_t i = 0; i < offer.produced(); ++i) seen.push_back(offer.row(i));
            for (const auto& r : seen)
                if (!X.member(r))
                    throw IllegalMoveError("player I offered the row " + r.str() +
                                               " outside the arena",
                                           1, k);
            detail::check_reply_order(t, y, k);
            EchelonBasis span = EchelonBasis::from_rows(X.spec(), seen);
            if (!span.contains(y))
                throw IllegalMoveError("player II replied " + y.str() +
                                           " outside the offered subspace",
                                       2, k);
            t.append(RoundRecord{std::move(seen), 0, std::move(y)});
        } else {
            std::size_t n = strat_I.bound(t);
            SparseVector y = strat_II.reply(t, n);
            detail::check_reply_order(t, y, k);
            if (y.min_support() <= n)
                throw IllegalMoveError("player II replied " + y.str() +
                                           " with support not above the bound " +
                                           std::to_string(n),
                                       2, k);
            if (!X.member(y))
                throw IllegalMoveError("player II replied " + y.str() + " outside the arena",
                                       2, k);
            t.append(RoundRecord{{}, n, std::move(y)});
        }
    }
    return t;
}

/// Pure replay validator: re-checks every legality rule of a finished
/// transcript against a fresh arena stream.  Throws IllegalMoveError on the
/// first violation; a transcript returned by `play` always passes.
inline void validate_transcript(const GameTranscript& t) {
    SubspaceStream X(t.arena(), t.spec());
    for (std::size_t k = 0; k < t.rounds().size(); ++k) {
        Fuel::tick();
        const RoundRecord& rec = t.rounds()[k];
        const SparseVector& y = rec.reply;
        if (y.is_zero()) throw IllegalMoveError("player II played the zero vector", 2, k);
        if (k > 0 && !block_lt(t.rounds()[k - 1].reply, y))
            throw IllegalMoveError("player II broke the block ordering", 2, k);
        if (t.kind() == GameKind::Gowers) {
            EchelonBasis span = [&] {
                try {
                    return EchelonBasis::from_rows(t.spec(), rec.offered);
                } catch (const InvalidArgumentError& err) {
                    throw IllegalMoveError(std::string("player I's recorded offer is not a "
                                                       "reduced echelon presentation: ") +
                                               err.what(),
                                           1, k);
                }
            }();
            for (const auto& r : rec.offered)
                if (!X.member(r))
                    throw IllegalMoveError("player I offered the row " + r.str() +
                                               " outside the arena",
                                           1, k);
            if (!span.contains(y))
                throw IllegalMoveError("player II replied outside the offered subspace", 2, k);
        } else {
            if (y.min_support() <= rec.bound)
                throw IllegalMoveError("player II replied at or below the bound", 2, k);
            if (!X.member(y))
                throw IllegalMoveError("player II replied outside the arena", 2, k);
        }
    }
    if (!is_block_sequence(t.outcome()))
        throw IllegalMoveError("outcome is not a block sequence", 2, t.rounds().size());
}

namespace detail {

/// Reduced echelon rows of span(X prefix) ∩ span(Y prefix), with both
/// prefixes covering every pivot up to the window.  Each row is a genuine
/// element of both subspaces, so the list presents a subspace of the full
/// intersection.
inline std::vector<SparseVector> window_intersection(SubspaceStream& X, SubspaceStream& Y,
                                                     std::size_t window) {
    EchelonBasis xb = X.rows_until_pivot_exceeds(window);
    EchelonBasis yb = Y.rows_until_pivot_exceeds(window);
    return intersect(xb, yb).rows();
}

/// Present a finite reduced-echelon row list as a stream.  Pulling past the
/// end raises CertificateError: the working depth behind the list was too
/// shallow for the consumer.
inline Preset finite_offer(const std::string& label, std::vector<SparseVector> rows) {
    return Preset::block_generator(
        label, [label, rows = std::move(rows)](FieldSpec, std::size_t n) {
            if (n >= rows.size())
                throw CertificateError("offer '" + label + "' exhausted after " +
                                       std::to_string(rows.size()) +
                                       " rows: working depth too shallow");
            return rows[n];
        });
}

}  // namespace detail

/// Player I strategy for the subspace game: fix the repetition schedule
/// s(n) = (certified members)[n mod count] and offer, in round n, the window
/// intersection of the arena with member s(n).  Any legal II then lands its
/// round-n vector inside member s(n).
inline StrategyI strat_I_into_H(const ADFamily& fam, const SubspaceStream& X,
                                std::size_t h_depth = 2, std::size_t working_depth = 24) {
    SubspaceStream probe = X.fork();
    HCertificate cert = in_H(probe.prefix(working_depth).rows(), fam, h_depth);
    std::vector<std::size_t> selected;
    for (const auto& ev : cert.members) selected.push_back(ev.member);
    if (selected.empty())
        throw CertificateError("no family member meets the arena at working depth " +
                               std::to_string(working_depth));
    return StrategyI::offers([fam, selected, working_depth](const GameTranscript& t) {
        std::size_t n = t.rounds().size();
        std::size_t member = selected[n % selected.size()];
        SubspaceStream arena(t.arena(), t.spec());
        SubspaceStream y = fam.stream(member);
        auto rows = detail::window_intersection(arena, y, working_depth);
        if (rows.empty())
            throw CertificateError("arena meets member " + std::to_string(member) +
                                   " trivially at working depth " +
                                   std::to_string(working_depth));
        return SubspaceStream(
            detail::finite_offer("arena ∩ member " + std::to_string(member), std::move(rows)),
            t.spec());
    });
}

/// Player II strategy for the asymptotic game: in round n, play the first
/// row of member s(n) = n mod (family size) lying above both the bound and
/// the previous reply.  Member streams are cofinal in themselves, so a legal
/// row always exists.
inline StrategyII strat_II_first_element(const ADFamily& fam) {
    if (fam.size() == 0)
        throw InvalidArgumentError("the first-element strategy needs a nonempty family");
    return StrategyII::above([fam](const GameTranscript& t, std::size_t bound) {
        std::size_t n = t.rounds().size();
        std::size_t floor = bound;
        if (!t.rounds().empty())
            floor = std::max(floor, t.rounds().back().reply.max_support());
        SubspaceStream y = fam.stream(n % fam.size());
        return first_row_above(y, floor);
    });
}

/// The member-pinning pair: a player I strategy for the subspace game that
/// constantly offers (arena ∩ chosen member), and a player II strategy for
/// the asymptotic game that always answers inside the chosen member.  Either
/// way every outcome vector lies in the member, so the whole outcome span
/// sits inside it.
inline std::pair<StrategyI, StrategyII> strat_pair_into_Abar(std::size_t member,
                                                            const ADFamily& fam,
                                                            std::size_t working_depth = 24) {
    if (member >= fam.size())
        throw InvalidArgumentError("member index " + std::to_string(member) +
                                   " out of range for a family of size " +
                                   std::to_string(fam.size()));
    StrategyI one = StrategyI::offers([fam, member, working_depth](const GameTranscript& t) {
        SubspaceStream arena(t.arena(), t.spec());
        SubspaceStream y = fam.stream(member);
        auto rows = detail::window_intersection(arena, y, working_depth);
        if (rows.empty())
            throw CertificateError("arena meets member " + std::to_string(member) +
                                   " trivially at working depth " +
                                   std::to_string(working_depth));
        return SubspaceStream(
            detail::finite_offer("arena ∩ member " + std::to_string(member), std::move(rows)),
            t.spec());
    });
    StrategyII two = StrategyII::above([fam, member](const GameTranscript& t, std::size_t bound) {
        std::size_t floor = bound;
        if (!t.rounds().empty())
            floor = std::max(floor, t.rounds().back().reply.max_support());
        SubspaceStream y = fam.stream(member);
        return first_row_above(y, floor);
    });
    return {std::move(one), std::move(two)};
}

/// Degenerate player I for the subspace game: always offer the arena itself.
inline StrategyI arena_offer_strategy() {
    return StrategyI::offers(
        [](const GameTranscript& t) { return SubspaceStream(t.arena(), t.spec()); });
}

/// Degenerate player II for the subspace game: pull the offer until a row
/// lies above the previous reply and play that row.
inline StrategyII first_row_reply_strategy() {
    return StrategyII::in_offer([](const GameTranscript& t, SubspaceStream& offer) {
        std::optional<std::size_t> floor;
        if (!t.rounds().empty()) floor = t.rounds().back().reply.max_support();
        return first_row_above(offer, floor);
    });
}

/// Degenerate player I for the asymptotic game: play n_k = k.
inline StrategyI counting_bound_strategy() {
    return StrategyI::bounds([](const GameTranscript& t) { return t.rounds().size(); });
}

}  // namespace madvec
