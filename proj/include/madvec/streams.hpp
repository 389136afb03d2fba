#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "madvec/echelon.hpp"
#include "madvec/fuel.hpp"
#include "madvec/vectors.hpp"

namespace madvec {

// ---------------------------------------------------------------------------
// Raw producers: pull sources feeding the canonicalizer.

/// A replayable pull source of arbitrary spanning vectors together with a
/// support floor promise: every vector a future next() returns has minimal
/// support >= future_min_support().  The floor must be nondecreasing; the
/// canonicalizer emits a reduced row once the floor passes the row's maximal
/// support, because later input can then neither create a smaller pivot nor
/// back-substitute into it.
class RawProducer {
public:
    virtual ~RawProducer() = default;
    virtual std::optional<SparseVector> next() = 0;
    virtual std::size_t future_min_support() const = 0;
};

/// Finite vector list.  The floor is the exact minimum over the unread rest,
/// infinity once exhausted.
class VectorListProducer : public RawProducer {
public:
    VectorListProducer(FieldSpec spec, std::vector<SparseVector> vs)
        : spec_(spec), vs_(std::move(vs)) {}

    std::optional<SparseVector> next() override {
        if (pos_ >= vs_.size()) return std::nullopt;
        return vs_[pos_++];
    }

    std::size_t future_min_support() const override {
        std::size_t floor = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = pos_; i < vs_.size(); ++i)
            if (!vs_[i].is_zero()) floor = std::min(floor, vs_[i].min_support());
        return floor;
    }

private:
    FieldSpec spec_;
    std::vector<SparseVector> vs_;
    std::size_t pos_ = 0;
};

/// General producer from a pair of pure functions: vector at position n, and
/// the support floor after n pulls.  Both must be deterministic so replaying
/// the producer replays the stream.
class GeneratorProducer : public RawProducer {
public:
    GeneratorProducer(std::function<std::optional<SparseVector>(std::size_t)> gen,
                      std::function<std::size_t(std::size_t)> floor)
        : gen_(std::move(gen)), floor_(std::move(floor)) {}

    std::optional<SparseVector> next() override {
        auto v = gen_(pos_);
        if (v) ++pos_;
        return v;
    }

    std::size_t future_min_support() const override { return floor_(pos_); }

private:
    std::function<std::optional<SparseVector>(std::size_t)> gen_;
    std::function<std::size_t(std::size_t)> floor_;
    std::size_t pos_ = 0;
};

using ProducerFactory = std::function<std::unique_ptr<RawProducer>()>;

// ---------------------------------------------------------------------------
// Presets: finite, field-independent descriptions of infinite streams.

class Preset;

/// Rows e_{r + m n}: the coordinates in one residue class mod m.
struct DiagonalResiduePreset {
    std::size_t r;
    std::size_t m;
};

/// Rows e_j for j in a named index set.  "val2" with parameter k is the set
/// { j : the 2-adic valuation of j+1 equals k } = { (2n+1)*2^k - 1 : n >= 0 };
/// over k these sets partition the coordinates.
struct DiagonalIndexSetPreset {
    std::string ix;  // currently only "val2"
    std::size_t k;
};

/// Row n is the fixed coefficient pattern stamped on the n-th aligned window
/// of width m: sum of c_j * e_{m n + off_j}.  Offsets are strictly increasing
/// and below m, so consecutive rows are block; coefficients are scalar
/// literals resolved against the stream's field, normalized so the leading
/// coefficient is 1.
struct PatternPreset {
    std::size_t m;
    std::vector<std::pair<std::size_t, std::string>> terms;
};

/// Rows e_{code(b|n)} along the branch b of the infinite binary tree obtained
/// by cycling the given bit string.  Nodes are numbered level by level:
/// code(s) = 2^|s| - 1 + (s read as a binary numeral), so codes strictly
/// increase along every branch and distinct branches eventually diverge.
struct PerfectBranchPreset {
    std::string bits;  // nonempty string over {0,1}, cycled
};

/// API-only preset wrapping an arbitrary deterministic block-row generator.
/// Not serializable; the label only aids error messages.
struct BlockGeneratorPreset {
    std::string label;
    std::function<SparseVector(FieldSpec, std::size_t)> gen;
};

/// API-only preset wrapping a replayable raw-producer factory; the stream is
/// the canonicalized reduced echelon basis of everything the producer spans.
struct CanonicalizedPreset {
    std::string label;
    std::function<ProducerFactory(FieldSpec)> make;
};

/// The tail inner/above: rows of the inner stream with pivot > above.
struct TailPreset {
    std::shared_ptr<const Preset> of;
    std::size_t above;
};

class Preset {
public:
    using Kind = std::variant<DiagonalResiduePreset, DiagonalIndexSetPreset, PatternPreset,
                              PerfectBranchPreset, BlockGeneratorPreset, CanonicalizedPreset,
                              TailPreset>;

    static Preset diagonal_residue(std::size_t r, std::size_t m) {
        if (m == 0 || r >= m)
            throw InvalidArgumentError("diagonal-residue needs r < m, got r=" +
                                       std::to_string(r) + " m=" + std::to_string(m));
        return Preset(DiagonalResiduePreset{r, m});
    }

    static Preset diagonal_indexset(const std::string& ix, std::size_t k) {
        if (ix != "val2")
            throw InvalidArgumentError("unknown index set: " + ix);
        if (k > 40) throw InvalidArgumentError("val2 parameter too large");
        return Preset(DiagonalIndexSetPreset{ix, k});
    }

    static Preset pattern(std::size_t m,
                          std::vector<std::pair<std::size_t, std::string>> terms) {
        if (m == 0 || terms.empty())
            throw InvalidArgumentError("pattern needs width >= 1 and at least one term");
        for (std::size_t j = 0; j < terms.size(); ++j) {
            if (terms[j].first >= m)
                throw InvalidArgumentError("pattern term offset " +
                                           std::to_string(terms[j].first) +
                                           " not below width " + std::to_string(m));
            if (j + 1 < terms.size() && terms[j].first >= terms[j + 1].first)
                throw InvalidArgumentError("pattern term offsets must strictly increase");
        }
        return Preset(PatternPreset{m, std::move(terms)});
    }

    static Preset perfect_branch(const std::string& bits) {
        if (bits.empty()) throw InvalidArgumentError("perfect-branch needs nonempty bits");
        for (char c : bits)
            if (c != '0' && c != '1')
                throw InvalidArgumentError("perfect-branch bits must be 0/1, got: " + bits);
        return Preset(PerfectBranchPreset{bits});
    }

    static Preset block_generator(std::string label,
                                  std::function<SparseVector(FieldSpec, std::size_t)> gen) {
        return Preset(BlockGeneratorPreset{std::move(label), std::move(gen)});
    }

    static Preset canonicalized(std::string label,
                                std::function<ProducerFactory(FieldSpec)> make) {
        return Preset(CanonicalizedPreset{std::move(label), std::move(make)});
    }

    /// Tail above M; nested tails collapse to the larger cutoff.
    static Preset tail(const Preset& inner, std::size_t above) {
        if (const auto* t = std::get_if<TailPreset>(&inner.v_))
            return Preset(TailPreset{t->of, std::max(t->above, above)});
        return Preset(TailPreset{std::make_shared<const Preset>(inner), above});
    }

    const Kind& kind() const { return v_; }

    std::string kind_name() const {
        struct Namer {
            std::string operator()(const DiagonalResiduePreset&) { return "diagonal-residue"; }
            std::string operator()(const DiagonalIndexSetPreset&) { return "diagonal-indexset"; }
            std::string operator()(const PatternPreset&) { return "pattern"; }
            std::string operator()(const PerfectBranchPreset&) { return "perfect-branch"; }
            std::string operator()(const BlockGeneratorPreset&) { return "block-generator"; }
            std::string operator()(const CanonicalizedPreset&) { return "canonicalized"; }
            std::string operator()(const TailPreset&) { return "tail"; }
        };
        return std::visit(Namer{}, v_);
    }

    bool serializable() const {
        if (std::holds_alternative<BlockGeneratorPreset>(v_) ||
            std::holds_alternative<CanonicalizedPreset>(v_))
            return false;
        if (const auto* t = std::get_if<TailPreset>(&v_)) return t->of->serializable();
        return true;
    }

private:
    explicit Preset(Kind k) : v_(std::move(k)) {}
    Kind v_;
};

// ---------------------------------------------------------------------------
// Cursors: one-shot pull state for each preset kind.

namespace detail {

using Cursor = std::function<std::optional<SparseVector>()>;

inline Cursor make_cursor(const Preset& preset, FieldSpec spec);

inline Cursor index_cursor(FieldSpec spec, std::function<std::size_t(std::size_t)> index_of) {
    auto n = std::make_shared<std::size_t>(0);
    return [spec, index_of = std::move(index_of), n]() -> std::optional<SparseVector> {
        Fuel::tick();
        return SparseVector::unit(spec, index_of((*n)++));
    };
}

inline Cursor pattern_cursor(const PatternPreset& p, FieldSpec spec) {
    // Resolve and normalize the coefficients once.
    std::vector<std::pair<std::size_t, Scalar>> terms;
    for (const auto& [off, lit] : p.terms) {
        Scalar c = Scalar::parse(spec, lit);
        if (c.is_zero())
            throw InvalidArgumentError("pattern coefficient at offset " + std::to_string(off) +
                                       " is zero");
        terms.emplace_back(off, c);
    }
    Scalar lead_inv = terms.front().second.inverse();
    for (auto& [off, c] : terms) c = c * lead_inv;
    std::size_t m = p.m;
    auto n = std::make_shared<std::size_t>(0);
    return [spec, terms = std::move(terms), m, n]() -> std::optional<SparseVector> {
        Fuel::tick();
        std::vector<SparseVector::Entry> es;
        for (const auto& [off, c] : terms) es.emplace_back(m * (*n) + off, c);
        ++(*n);
        return SparseVector::make(spec, std::move(es));
    };
}

inline Cursor perfect_branch_cursor(const PerfectBranchPreset& p, FieldSpec spec) {
    std::string bits = p.bits;
    auto n = std::make_shared<std::size_t>(0);
    return [spec, bits, n]() -> std::optional<SparseVector> {
        Fuel::tick();
        std::size_t depth = (*n)++;
        if (depth > 62)
            throw FuelExhaustedError("perfect-branch node codes exceed 2^63 at depth " +
                                     std::to_string(depth));
        // code = 2^depth - 1 + binary value of the first depth bits
        std::size_t val = 0;
        for (std::size_t i = 0; i < depth; ++i)
            val = (val << 1) | static_cast<std::size_t>(bits[i % bits.size()] - '0');
        std::size_t code = ((std::size_t{1} << depth) - 1) + val;
        return SparseVector::unit(spec, code);
    };
}

inline Cursor block_generator_cursor(const BlockGeneratorPreset& p, FieldSpec spec) {
    auto n = std::make_shared<std::size_t>(0);
    auto gen = p.gen;
    std::string label = p.label;
    return [spec, gen, label, n]() -> std::optional<SparseVector> {
        Fuel::tick();
        SparseVector v = gen(spec, (*n)++);
        if (v.is_zero())
            throw StreamInvariantError("block generator '" + label + "' produced 0 at row " +
                                       std::to_string(*n - 1));
        // normalize the leading coefficient; everything else is validated by
        // the stream's cumulative invariant check
        return v.scaled(v.coeff(v.min_support()).inverse());
    };
}

inline Cursor tail_cursor(const TailPreset& p, FieldSpec spec) {
    Cursor inner = make_cursor(*p.of, spec);
    std::size_t above = p.above;
    return [inner = std::move(inner), above]() -> std::optional<SparseVector> {
        while (true) {
            Fuel::tick();
            auto v = inner();
            if (!v) return std::nullopt;
            if (!v->is_zero() && v->min_support() > above) return v;
        }
    };
}

inline Cursor canonicalize_cursor(FieldSpec spec, const ProducerFactory& factory) {
    struct State {
        std::unique_ptr<RawProducer> producer;
        EchelonBasis acc;
        std::size_t emitted = 0;
        bool exhausted = false;
        State(FieldSpec s, std::unique_ptr<RawProducer> p)
            : producer(std::move(p)), acc(s) {}
    };
    auto st = std::make_shared<State>(spec, factory());
    return [st, spec]() -> std::optional<SparseVector> {
        while (true) {
            Fuel::tick();
            if (st->emitted < st->acc.dim()) {
                const SparseVector& cand = st->acc.rows()[st->emitted];
                std::size_t floor = st->exhausted ? std::numeric_limits<std::size_t>::max()
                                                  : st->producer->future_min_support();
                // Safe to emit once no future vector can reach the row: new
                // pivots land at or above the floor and back-substitution only
                // touches rows with support there.
                if (cand.max_support() < floor) return st->acc.rows()[st->emitted++];
            }
            if (st->exhausted)
                throw FiniteInputError(
                    "canonicalize: raw producer exhausted after spanning only " +
                    std::to_string(st->acc.dim()) + " dimensions");
            auto v = st->producer->next();
            if (!v) {
                st->exhausted = true;
                continue;
            }
            require_same_field(spec, v->spec(), "canonicalize input");
            st->acc.insert(*v);
        }
    };
}

inline Cursor make_cursor(const Preset& preset, FieldSpec spec) {
    struct Maker {
        FieldSpec spec;
        Cursor operator()(const DiagonalResiduePreset& p) {
            return index_cursor(spec, [p](std::size_t n) { return p.r + p.m * n; });
        }
        Cursor operator()(const DiagonalIndexSetPreset& p) {
            // n-th element of { j : val2(j+1) = k } is (2n+1)*2^k - 1
            return index_cursor(
                spec, [p](std::size_t n) { return ((2 * n + 1) << p.k) - 1; });
        }
        Cursor operator()(const PatternPreset& p) { return pattern_cursor(p, spec); }
        Cursor operator()(const PerfectBranchPreset& p) {
            return perfect_branch_cursor(p, spec);
        }
        Cursor operator()(const BlockGeneratorPreset& p) {
            return block_generator_cursor(p, spec);
        }
        Cursor operator()(const CanonicalizedPreset& p) {
            return canonicalize_cursor(spec, p.make(spec));
        }
        Cursor operator()(const TailPreset& p) { return tail_cursor(p, spec); }
    };
    return std::visit(Maker{spec}, preset.kind());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SubspaceStream: a lazily pulled infinite reduced echelon basis.

/// An infinite-dimensional subspace presented as the lazy stream of its
/// canonical reduced echelon rows (strictly increasing pivots, unit leading
/// coefficients, pivot columns cleared across all rows produced so far).  The
/// cumulative invariant is re-checked on every pull, so a buggy generator
/// fails loudly instead of corrupting downstream computations.
///
/// Streams are single-owner mutable pull state; reading a row caches it.  Two
/// independent consumers should each instantiate their own stream from the
/// shared preset (replay yields identical rows).
class SubspaceStream {
public:
    SubspaceStream(Preset preset, FieldSpec spec)
        : preset_(std::move(preset)), spec_(spec),
          cursor_(detail::make_cursor(preset_, spec)) {}

    SubspaceStream(SubspaceStream&&) = default;
    SubspaceStream& operator=(SubspaceStream&&) = default;
    SubspaceStream(const SubspaceStream&) = delete;
    SubspaceStream& operator=(const SubspaceStream&) = delete;

    const Preset& preset() const { return preset_; }
    const FieldSpec& spec() const { return spec_; }
    std::size_t produced() const { return cache_.size(); }

    /// A fresh stream over the same preset, starting from row 0.
    SubspaceStream fork() const { return SubspaceStream(preset_, spec_); }

    const SparseVector& row(std::size_t i) {
        while (cache_.size() <= i) pull();
        return cache_[i];
    }

    /// First `depth` rows as a (finite) canonical basis.
    EchelonBasis prefix(std::size_t depth) {
        std::vector<SparseVector> rows;
        rows.reserve(depth);
        for (std::size_t i = 0; i < depth; ++i) rows.push_back(row(i));
        return EchelonBasis::from_rows(spec_, std::move(rows));
    }

    /// All rows with pivot <= K; complete because pivots strictly increase, so
    /// row K+1 at the latest has pivot > K.  Every stream vector supported
    /// inside [0, K] lies in the span of these rows: in any expression using a
    /// higher-pivot row, the smallest such pivot would stay visible.
    EchelonBasis rows_until_pivot_exceeds(std::size_t K) {
        std::vector<SparseVector> rows;
        for (std::size_t i = 0;; ++i) {
            const SparseVector& r = row(i);
            if (r.min_support() > K) break;
            rows.push_back(r);
        }
        return EchelonBasis::from_rows(spec_, std::move(rows));
    }

    /// Exact membership of a finitely supported vector in the full infinite
    /// span, decided inside the window of the vector's support.
    bool member(const SparseVector& x) {
        require_same_field(spec_, x.spec(), "stream member");
        if (x.is_zero()) return true;
        return rows_until_pivot_exceeds(x.max_support()).contains(x);
    }

    /// The tail subspace: rows with pivot > M (every stream vector with
    /// minimal support > M lies in their span, by the same pivot-visibility
    /// argument as above).
    SubspaceStream tail(std::size_t M) const {
        return SubspaceStream(Preset::tail(preset_, M), spec_);
    }

private:
    void pull() {
        auto v = cursor_();
        if (!v)
            throw FiniteInputError("stream of kind '" + preset_.kind_name() +
                                   "' exhausted after " + std::to_string(cache_.size()) +
                                   " rows");
        validate_next(*v);
        cache_.push_back(std::move(*v));
    }

    void validate_next(const SparseVector& r) const {
        const char* who = "stream invariant";
        if (r.is_zero()) throw StreamInvariantError(std::string(who) + ": zero row");
        std::size_t p = r.min_support();
        if (!r.coeff(p).is_one())
            throw StreamInvariantError(std::string(who) + ": row " +
                                       std::to_string(cache_.size()) +
                                       " not pivot-normalized: " + r.str());
        if (!cache_.empty() && cache_.back().min_support() >= p)
            throw StreamInvariantError(std::string(who) + ": pivots not increasing at row " +
                                       std::to_string(cache_.size()) + ": " + r.str());
        for (const auto& prev : cache_) {
            if (!prev.coeff(p).is_zero())
                throw StreamInvariantError(std::string(who) + ": earlier row " + prev.str() +
                                           " not cleared at new pivot " + std::to_string(p));
            if (!r.coeff(prev.min_support()).is_zero())
                throw StreamInvariantError(std::string(who) + ": new row " + r.str() +
                                           " not cleared at earlier pivot " +
                                           std::to_string(prev.min_support()));
        }
    }

    Preset preset_;
    FieldSpec spec_;
    detail::Cursor cursor_;
    std::vector<SparseVector> cache_;
};

inline SubspaceStream make_stream(const Preset& preset, FieldSpec spec) {
    return SubspaceStream(preset, spec);
}

inline bool stream_member(const SparseVector& x, SubspaceStream& Y) { return Y.member(x); }

inline SubspaceStream tail_stream(const SubspaceStream& Y, std::size_t M) {
    return Y.tail(M);
}

/// Canonical reduced echelon stream of span(everything the producer yields).
/// The factory must be pure: replaying it replays the stream byte for byte.
inline SubspaceStream canonicalize(FieldSpec spec, std::string label,
                                   std::function<ProducerFactory(FieldSpec)> make) {
    return SubspaceStream(Preset::canonicalized(std::move(label), std::move(make)), spec);
}

/// The whole space E as a stream (rows e_0, e_1, ...).
inline Preset whole_space_preset() { return Preset::diagonal_residue(0, 1); }

}  // namespace madvec
