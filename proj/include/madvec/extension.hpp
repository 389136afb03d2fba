#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "madvec/streams.hpp"

namespace madvec {

// ---------------------------------------------------------------------------
// Finite-window helpers.

/// First stream row with pivot above the floor (the whole first row when no
/// floor is given).  Returns a copy: row references into the stream cache are
/// invalidated by further pulls.
inline SparseVector first_row_above(SubspaceStream& Y, std::optional<std::size_t> floor) {
    for (std::size_t i = 0;; ++i) {
        SparseVector r = Y.row(i);
        if (!floor || r.min_support() > *floor) return r;
    }
}

/// span(X) ∩ Y for a finite X, computed exactly: every element of span(X) is
/// supported inside X's window, and stream vectors supported there lie in the
/// span of the rows with pivot inside the window.
inline EchelonBasis span_intersect_stream(const EchelonBasis& X, SubspaceStream& Y) {
    require_same_field(X.spec(), Y.spec(), "span_intersect_stream");
    auto W = X.max_support();
    if (!W) return X;  // zero space
    return intersect(X, Y.rows_until_pivot_exceeds(*W));
}

// ---------------------------------------------------------------------------
// The extension bound.

/// The window bound M = max(K, max support over rows with pivot <= K).
///
/// Dichotomy: for every block sequence x_0 < ... < x_m supported in [0, K]
/// and every x with min(supp x) > M,
///   span(xs, x) ∩ Y  =  span(xs) ∩ Y            when x is outside Y,
///   span(xs, x) ∩ Y  =  (span(xs) ∩ Y) + <x>    when x lies in Y.
/// Rows with pivot <= K are exactly the rows whose support meets [0, K], so
/// above M a new vector can neither complete an old partial overlap nor break
/// one.
inline std::size_t extend_bound(SubspaceStream& Y, std::size_t K) {
    EchelonBasis W = Y.rows_until_pivot_exceeds(K);
    std::size_t M = K;
    for (const auto& r : W.rows()) M = std::max(M, r.max_support());
    return M;
}

// ---------------------------------------------------------------------------
// Almost-disjointness certificates.

/// Finite evidence that members i and j overlap in at most a bounded window:
/// at the recorded depth, the intersection of the two prefixes has dimension
/// `dim` and (when nonzero) maximal support `bound`.  For a genuinely almost
/// disjoint pair the numbers stabilize once the depth passes the overlap.
struct ADCertificate {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t bound = 0;  // 0 when the certified intersection is trivial
    std::size_t dim = 0;
    std::size_t depth = 0;
};

inline ADCertificate compute_certificate(SubspaceStream& Yi, SubspaceStream& Yj,
                                         std::size_t i, std::size_t j, std::size_t depth) {
    require_same_field(Yi.spec(), Yj.spec(), "compute_certificate");
    EchelonBasis I = intersect(Yi.prefix(depth), Yj.prefix(depth));
    ADCertificate c;
    c.i = i;
    c.j = j;
    c.dim = I.dim();
    c.bound = I.dim() ? *I.max_support() : 0;
    c.depth = depth;
    return c;
}

/// Recomputes the certified quantities from scratch; any mismatch is a
/// certificate failure.
inline void verify_certificate(SubspaceStream& Yi, SubspaceStream& Yj,
                               const ADCertificate& c) {
    EchelonBasis I = intersect(Yi.prefix(c.depth), Yj.prefix(c.depth));
    std::size_t dim = I.dim();
    std::size_t bound = dim ? *I.max_support() : 0;
    if (dim != c.dim || bound != c.bound)
        throw CertificateError("certificate (" + std::to_string(c.i) + "," +
                               std::to_string(c.j) + ") fails re-verification: depth " +
                               std::to_string(c.depth) + " gives dim " + std::to_string(dim) +
                               " bound " + std::to_string(bound) + ", certificate says dim " +
                               std::to_string(c.dim) + " bound " + std::to_string(c.bound));
}

// ---------------------------------------------------------------------------
// Cutting a family down to pairwise disjoint tails.

struct DisjointResult {
    std::vector<SubspaceStream> tails;
    std::optional<std::size_t> cutoff;  // nullopt: all certified intersections trivial
};

/// Replaces each member by its tail above c* = the largest certified overlap
/// bound.  A vector in two tails would lie in both members, hence (by the
/// certificates) inside span(e_0..e_{c*}), yet have all support above c*: so
/// the tails are pairwise disjoint.  Members whose certificates all show a
/// trivial intersection are returned unchanged.  The conclusion is re-checked
/// at each pair's certified depth.
inline DisjointResult make_disjoint(std::vector<SubspaceStream>& Ys,
                                    const std::vector<ADCertificate>& certs) {
    std::optional<std::size_t> cutoff;
    for (const auto& c : certs) {
        if (c.i >= Ys.size() || c.j >= Ys.size())
            throw CertificateError("certificate names member " +
                                   std::to_string(std::max(c.i, c.j)) +
                                   " outside the family");
        verify_certificate(Ys[c.i], Ys[c.j], c);
        if (c.dim > 0 && (!cutoff || c.bound > *cutoff)) cutoff = c.bound;
    }
    DisjointResult out;
    for (auto& y : Ys)
        out.tails.push_back(cutoff ? y.tail(*cutoff) : y.fork());
    out.cutoff = cutoff;
    // re-check disjointness of the tails at the certified depths
    for (const auto& c : certs) {
        EchelonBasis I = intersect(out.tails[c.i].prefix(c.depth),
                                   out.tails[c.j].prefix(c.depth));
        if (I.dim() != 0)
            throw CertificateError("tails of members " + std::to_string(c.i) + " and " +
                                   std::to_string(c.j) + " still intersect at depth " +
                                   std::to_string(c.depth) + ": " + I.rows()[0].str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chain extension: one new vector in a designated member.

namespace detail {

/// Throws when span(xs) ∩ Y differs from the expected basis; the witness is
/// the first unexpected intersection vector.
inline void check_span_condition(const EchelonBasis& S, SubspaceStream& Y,
                                 const EchelonBasis& expected, std::size_t k,
                                 const char* what) {
    EchelonBasis I = span_intersect_stream(S, Y);
    if (I == expected) return;
    std::string witness = "?";
    for (const auto& r : I.rows())
        if (!expected.contains(r)) {
            witness = r.str();
            break;
        }
    throw PreconditionError(std::string(what) + " fails for member " + std::to_string(k) +
                                ": expected " + expected.str() + ", found " + I.str(),
                            k, witness);
}

/// Picks the first row of Ys[target] above the accumulated bound
///   M = max over all members of extend_bound(Y, K),  K = max supp so far.
/// Taking the bound over the WHOLE list (not just the members already
/// processed) is what keeps later chain steps' zero-intersection
/// preconditions true: above M, the dichotomy applies to every member at
/// once.
inline SparseVector pick_chain_row(std::vector<SubspaceStream>& Ys, std::size_t target,
                                   std::optional<std::size_t> K,
                                   std::optional<std::size_t>* M_out = nullptr) {
    std::optional<std::size_t> M;
    if (K) {
        std::size_t m = *K;
        for (auto& y : Ys) m = std::max(m, extend_bound(y, *K));
        M = m;
    }
    if (M_out) *M_out = M;
    return first_row_above(Ys[target], M);
}

inline std::optional<std::size_t> max_support_of(const std::vector<SparseVector>& xs) {
    std::optional<std::size_t> K;
    for (const auto& x : xs)
        if (!x.is_zero() && (!K || x.max_support() > *K)) K = x.max_support();
    return K;
}

}  // namespace detail

struct ExtendResult {
    SparseVector x;
    std::optional<std::size_t> floor;  // the bound M the new vector was chosen above
};

/// Given members Y_0..Y_{n+1} and a block sequence x_0..x_n with
///   span(xs) ∩ Y_k = <x_k>   for k <= n,   span(xs) ∩ Y_{n+1} = {0},
/// returns the first row x of Y_{n+1} above the extension bound; afterwards
///   span(xs, x) ∩ Y_k = <x_k>   and   span(xs, x) ∩ Y_{n+1} = <x>.
/// Preconditions and postconditions are both verified exactly on finite
/// windows; violations carry the offending member index and a witness vector.
inline ExtendResult extend_disjoint_one(std::vector<SubspaceStream>& Ys,
                                        const std::vector<SparseVector>& xs) {
    if (Ys.empty() || xs.size() + 1 != Ys.size())
        throw InvalidArgumentError("extend_disjoint_one needs one more member than xs (got " +
                                   std::to_string(Ys.size()) + " members, " +
                                   std::to_string(xs.size()) + " vectors)");
    if (!is_block_sequence(xs))
        throw PreconditionError("xs is not a block sequence", 0, "");
    FieldSpec spec = Ys[0].spec();
    std::size_t n1 = Ys.size() - 1;
    EchelonBasis S = rref(spec, xs);
    for (std::size_t k = 0; k < n1; ++k) {
        if (!Ys[k].member(xs[k]))
            throw PreconditionError("x_" + std::to_string(k) + " is not a member of Y_" +
                                        std::to_string(k),
                                    k, xs[k].str());
        detail::check_span_condition(S, Ys[k], rref(spec, {xs[k]}), k,
                                     "line condition span(xs) ∩ Y_k = <x_k>");
    }
    detail::check_span_condition(S, Ys[n1], EchelonBasis(spec), n1,
                                 "zero condition span(xs) ∩ Y_{n+1} = {0}");

    ExtendResult out{SparseVector(spec), std::nullopt};
    out.x = detail::pick_chain_row(Ys, n1, detail::max_support_of(xs), &out.floor);

    // verify the whole conclusion
    std::vector<SparseVector> ext = xs;
    ext.push_back(out.x);
    EchelonBasis S2 = rref(spec, ext);
    for (std::size_t k = 0; k < n1; ++k)
        detail::check_span_condition(S2, Ys[k], rref(spec, {xs[k]}), k,
                                     "extension conclusion for earlier member");
    detail::check_span_condition(S2, Ys[n1], rref(spec, {out.x}), n1,
                                 "extension conclusion for the new member");
    return out;
}

// ---------------------------------------------------------------------------
// Extension avoiding every member.

/// First standard basis vector e_j with j > floor outside Y.  Gives up (fuel
/// error) after a bounded scan: a stream containing the whole tail of E has
/// no avoidable direction and cannot be refuted from finite evidence.
inline SparseVector basis_vector_outside(SubspaceStream& Y, std::size_t floor,
                                         std::size_t scan_width = 1024) {
    for (std::size_t j = floor + 1; j <= floor + scan_width; ++j) {
        Fuel::tick();
        SparseVector ej = SparseVector::unit(Y.spec(), j);
        if (!Y.member(ej)) return ej;
    }
    throw FuelExhaustedError("no basis vector outside the stream found in (" +
                             std::to_string(floor) + ", " +
                             std::to_string(floor + scan_width) + "]");
}

/// Given pairwise disjoint members and a block sequence xs with
/// span(xs) ∩ Y_k = {0} for every k, produces x above xs with
/// span(xs, x) ∩ Y_k = {0} for every k (so iterating strictly grows the span
/// while keeping it disjoint from the whole list).
///
/// With two or more members, x is the sum of a chain x'_0 ∈ Y_0, ..., built
/// with whole-list bounds: each partial sum keeps line intersections <x'_k>,
/// and a combination landing in Y_k would force the block-independent
/// components of the other members to vanish.  With a single member no sum
/// trick exists; x is the first avoidable basis direction above the bound.
/// With no members at all, the first basis row of E above xs works.
inline SparseVector extend_avoiding_all(FieldSpec spec, std::vector<SubspaceStream>& Ys,
                                        const std::vector<SparseVector>& xs) {
    if (!is_block_sequence(xs))
        throw PreconditionError("xs is not a block sequence", 0, "");
    std::optional<std::size_t> K = detail::max_support_of(xs);

    if (Ys.empty()) return SparseVector::unit(spec, K ? *K + 1 : 0);

    require_same_field(spec, Ys[0].spec(), "extend_avoiding_all");
    EchelonBasis S = rref(spec, xs);
    for (std::size_t k = 0; k < Ys.size(); ++k)
        detail::check_span_condition(S, Ys[k], EchelonBasis(spec), k,
                                     "zero condition span(xs) ∩ Y_k = {0}");

    SparseVector x(spec);
    if (Ys.size() == 1) {
        std::size_t M = K ? extend_bound(Ys[0], *K) : 0;
        x = basis_vector_outside(Ys[0], M);
    } else {
        // chain: x'_t = first row of Y_t above the whole-list bound
        std::vector<SparseVector> chain = xs;
        std::vector<SparseVector> picked;
        for (std::size_t t = 0; t < Ys.size(); ++t) {
            SparseVector xt =
                detail::pick_chain_row(Ys, t, detail::max_support_of(chain), nullptr);
            chain.push_back(xt);
            picked.push_back(xt);
            // chain invariant: lines at the picked members, zero elsewhere
            EchelonBasis C = rref(spec, chain);
            for (std::size_t k = 0; k < Ys.size(); ++k)
                detail::check_span_condition(
                    C, Ys[k],
                    k < picked.size() ? rref(spec, {picked[k]}) : EchelonBasis(spec), k,
                    "chain invariant (are the members really pairwise disjoint?)");
        }
        for (const auto& xt : picked) x = x + xt;
    }

    // exact final check
    std::vector<SparseVector> ext = xs;
    ext.push_back(x);
    EchelonBasis S2 = rref(spec, ext);
    for (std::size_t k = 0; k < Ys.size(); ++k)
        detail::check_span_condition(S2, Ys[k], EchelonBasis(spec), k,
                                     "avoidance conclusion span(xs, x) ∩ Y_k = {0}");
    return x;
}

// ---------------------------------------------------------------------------
// Continuity modulo a finite-dimensional correction.

/// Given a block stream Y, a finite correction list zs, and a stream X all of
/// whose vectors lie in Y + <zs>, the tail of X above
///   M = extend_bound(Y, N),   N = max support over zs (0 when empty),
/// lies in Y itself: writing x = y' + y'' + w with y' in the rows meeting
/// [0, N], y'' in the later rows and w in <zs>, the parts below and above M
/// must vanish separately because the later block rows sit entirely above M.
///
/// The inclusion X ⊆ Y + <zs> is spot-checked on the first 8 rows of X and
/// the conclusion X/M ⊆ Y on the next 8 tail rows; Y must present a block
/// basis for the support-splitting argument to be sound.
inline std::size_t cont_mod_finite_bound(SubspaceStream& X, SubspaceStream& Y,
                                         const std::vector<SparseVector>& zs) {
    require_same_field(X.spec(), Y.spec(), "cont_mod_finite_bound");
    FieldSpec spec = X.spec();
    std::size_t N = 0;
    for (const auto& z : zs) {
        require_same_field(spec, z.spec(), "cont_mod_finite_bound correction");
        if (!z.is_zero()) N = std::max(N, z.max_support());
    }
    std::size_t M = extend_bound(Y, N);

    // blockness of Y on the window the argument uses
    {
        EchelonBasis W = Y.rows_until_pivot_exceeds(M);
        std::vector<SparseVector> wr = W.rows();
        wr.push_back(Y.row(W.dim()));  // first row beyond the window
        if (!is_block_sequence(wr))
            throw InvalidArgumentError(
                "cont_mod_finite_bound: Y does not present a block basis");
    }

    // spot-check the hypothesis X ⊆ Y + <zs> on the first 8 rows
    for (std::size_t i = 0; i < 8; ++i) {
        SparseVector x = X.row(i);
        std::size_t W = std::max(N, x.max_support());
        EchelonBasis B = Y.rows_until_pivot_exceeds(W);
        for (const auto& z : zs) B.insert(z);
        if (!B.contains(x))
            throw PreconditionError("row " + std::to_string(i) +
                                        " of X is outside Y + <zs>",
                                    i, x.str());
    }

    // verify the conclusion on the next 8 rows of the tail X/M
    auto tail = X.tail(M);
    for (std::size_t i = 0; i < 8; ++i) {
        SparseVector x = tail.row(i);
        if (!Y.member(x))
            throw PreconditionError("tail row " + std::to_string(i) +
                                        " of X/M escapes Y (hypothesis fails deeper in X)",
                                    i, x.str());
    }
    return M;
}

}  // namespace madvec
