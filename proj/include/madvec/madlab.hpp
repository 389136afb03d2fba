#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "madvec/extension.hpp"
#include "madvec/streams.hpp"

namespace madvec {

// ---------------------------------------------------------------------------
// Families.

/// An almost-disjoint family: member subspaces given by presets, plus
/// pairwise overlap certificates.  Streams are created on demand so every
/// consumer pulls its own cursor.
class ADFamily {
public:
    ADFamily(FieldSpec spec, std::vector<Preset> members)
        : spec_(spec), members_(std::move(members)) {}

    /// Builds the family and computes every pairwise certificate at the given
    /// depth.
    static ADFamily certified(FieldSpec spec, std::vector<Preset> members,
                              std::size_t depth) {
        ADFamily fam(spec, std::move(members));
        for (std::size_t i = 0; i < fam.size(); ++i)
            for (std::size_t j = i + 1; j < fam.size(); ++j) {
                auto yi = fam.stream(i);
                auto yj = fam.stream(j);
                fam.set_cert(compute_certificate(yi, yj, i, j, depth));
            }
        return fam;
    }

    const FieldSpec& spec() const { return spec_; }
    std::size_t size() const { return members_.size(); }

    const Preset& member_preset(std::size_t i) const {
        if (i >= members_.size())
            throw InvalidArgumentError("member index " + std::to_string(i) +
                                       " out of range (family has " +
                                       std::to_string(members_.size()) + " members)");
        return members_[i];
    }

    SubspaceStream stream(std::size_t i) const {
        return SubspaceStream(member_preset(i), spec_);
    }

    void set_cert(ADCertificate c) {
        if (c.i == c.j) throw InvalidArgumentError("certificate pairs a member with itself");
        auto key = std::minmax(c.i, c.j);
        if (c.i > c.j) std::swap(c.i, c.j);
        certs_[{key.first, key.second}] = c;
    }

    bool has_cert(std::size_t i, std::size_t j) const {
        auto key = std::minmax(i, j);
        return certs_.count({key.first, key.second}) > 0;
    }

    const ADCertificate& cert(std::size_t i, std::size_t j) const {
        auto key = std::minmax(i, j);
        auto it = certs_.find({key.first, key.second});
        if (it == certs_.end())
            throw CertificateError("no certificate for pair (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
        return it->second;
    }

    const std::map<std::pair<std::size_t, std::size_t>, ADCertificate>& certs() const {
        return certs_;
    }

    /// All pairwise certificates, in (i, j) order; throws if any is missing.
    std::vector<ADCertificate> all_certs() const {
        std::vector<ADCertificate> out;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i + 1; j < size(); ++j) out.push_back(cert(i, j));
        return out;
    }

    /// Re-verifies every stored certificate against fresh streams.
    void verify_certs() const {
        for (const auto& [key, c] : certs_) {
            auto yi = stream(c.i);
            auto yj = stream(c.j);
            verify_certificate(yi, yj, c);
        }
    }

private:
    FieldSpec spec_;
    std::vector<Preset> members_;
    std::map<std::pair<std::size_t, std::size_t>, ADCertificate> certs_;
};

// ---------------------------------------------------------------------------
// Overlap and window growth functions.

/// f(alpha, n): the certified bound k with Y_alpha ∩ Y_n ⊆ span(e_0..e_k)
/// (0 when the certified intersection is trivial).
inline std::size_t f_alpha(const ADFamily& fam, std::size_t alpha, std::size_t n) {
    if (alpha == n)
        throw InvalidArgumentError("f_alpha needs two distinct members, got " +
                                   std::to_string(alpha) + " twice");
    return fam.cert(alpha, n).bound;
}

/// g(alpha, n): the extension bound of member alpha over the window [0, n].
/// Monotone in n; equal to n below the member's first pivot.
inline std::size_t g_alpha(const ADFamily& fam, std::size_t alpha, std::size_t n) {
    auto y = fam.stream(alpha);
    return extend_bound(y, n);
}

// ---------------------------------------------------------------------------
// Non-maximality witnesses.

struct WitnessCheck {
    std::size_t k;                   // member index
    bool line;                       // true: span ∩ member = <x>; false: = {0}
    std::optional<SparseVector> x;   // the line generator when line is true
};

struct NonmaxWitness {
    std::vector<SparseVector> xs;
    std::optional<std::size_t> cutoff;  // tail cutoff used (certified overlap)
    std::vector<WitnessCheck> checks;   // verified conclusions, one per member
};

/// Iterates the avoiding extension: a block sequence x_0 < ... < x_{len-1}
/// whose span meets every member trivially after the certified overlap is cut
/// away (and meets the original members inside span(e_0..e_cutoff), keeping
/// the extended family almost disjoint).  The family may be empty; then the
/// witness is just the first len basis rows of E.
inline NonmaxWitness witness_nonmax_finite(const ADFamily& fam, std::size_t len) {
    FieldSpec spec = fam.spec();
    NonmaxWitness out;
    std::vector<SubspaceStream> members;
    for (std::size_t i = 0; i < fam.size(); ++i) members.push_back(fam.stream(i));
    DisjointResult dis = make_disjoint(members, fam.all_certs());
    out.cutoff = dis.cutoff;

    for (std::size_t step = 0; step < len; ++step)
        out.xs.push_back(extend_avoiding_all(spec, dis.tails, out.xs));

    // conclusions: trivial against the tails; bounded against the originals
    EchelonBasis S = rref(spec, out.xs);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        EchelonBasis I = span_intersect_stream(S, dis.tails[k]);
        if (I.dim() != 0)
            throw PreconditionError("witness still meets the tail of member " +
                                        std::to_string(k),
                                    k, I.rows()[0].str());
        auto orig = fam.stream(k);
        EchelonBasis J = span_intersect_stream(S, orig);
        if (J.dim() != 0 && (!out.cutoff || *J.max_support() > *out.cutoff))
            throw PreconditionError("witness meets member " + std::to_string(k) +
                                        " beyond the certified overlap",
                                    k, J.rows()[0].str());
        out.checks.push_back({k, false, std::nullopt});
    }
    return out;
}

/// The enumerated version: processes the first len members as a chain,
/// producing x_n in (the tail of) Y_n with the exact line conclusion
///   span(x_0..x_{len-1}) ∩ Y_n' = <x_n>   for every n < len
/// (Y' the pairwise disjoint tails; equal to the members when the certified
/// overlaps are trivial).  Each pick uses the whole-list extension bound so
/// the later zero conditions stay true when their turn comes.
inline NonmaxWitness witness_nonmax_countable(const ADFamily& fam, std::size_t len) {
    if (len == 0) return {};
    if (len > fam.size())
        throw InvalidArgumentError("witness_nonmax_countable: len " + std::to_string(len) +
                                   " exceeds the " + std::to_string(fam.size()) +
                                   " enumerated members");
    FieldSpec spec = fam.spec();
    std::vector<SubspaceStream> members;
    std::vector<ADCertificate> certs;
    for (std::size_t i = 0; i < len; ++i) members.push_back(fam.stream(i));
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i + 1; j < len; ++j) certs.push_back(fam.cert(i, j));
    DisjointResult dis = make_disjoint(members, certs);

    NonmaxWitness out;
    out.cutoff = dis.cutoff;
    for (std::size_t n = 0; n < len; ++n) {
        SparseVector x = detail::pick_chain_row(dis.tails, n,
                                                detail::max_support_of(out.xs), nullptr);
        out.xs.push_back(x);
    }
    // exact line conclusions (prefix versions follow: a prefix's intersection
    // is squeezed between <x_n> and the full one)
    EchelonBasis S = rref(spec, out.xs);
    for (std::size_t n = 0; n < len; ++n) {
        detail::check_span_condition(S, dis.tails[n], rref(spec, {out.xs[n]}), n,
                                     "countable witness line condition");
        out.checks.push_back({n, true, out.xs[n]});
    }
    return out;
}

/// Re-verifies a witness transcript against the family it was built from.
inline void verify_nonmax_witness(const ADFamily& fam, const NonmaxWitness& w) {
    FieldSpec spec = fam.spec();
    if (!is_block_sequence(w.xs))
        throw CertificateError("witness vectors are not a block sequence");
    EchelonBasis S = rref(spec, w.xs);
    if (S.dim() != w.xs.size())
        throw CertificateError("witness vectors are linearly dependent");
    for (const auto& chk : w.checks) {
        if (chk.k >= fam.size())
            throw CertificateError("witness check names member " + std::to_string(chk.k) +
                                   " outside the family");
        auto y = fam.stream(chk.k);
        auto tail = w.cutoff ? y.tail(*w.cutoff) : y.fork();
        EchelonBasis I = span_intersect_stream(S, tail);
        if (chk.line) {
            if (!chk.x)
                throw CertificateError("line check without a generator for member " +
                                       std::to_string(chk.k));
            if (I != rref(spec, {*chk.x}))
                throw CertificateError("line check fails for member " + std::to_string(chk.k) +
                                       ": intersection is " + I.str());
        } else {
            if (I.dim() != 0)
                throw CertificateError("disjointness check fails for member " +
                                       std::to_string(chk.k) + ": found " +
                                       I.rows()[0].str());
            // against the original member the overlap must stay certified
            auto orig = fam.stream(chk.k);
            EchelonBasis J = span_intersect_stream(S, orig);
            if (J.dim() != 0 && (!w.cutoff || *J.max_support() > *w.cutoff))
                throw CertificateError("witness meets member " + std::to_string(chk.k) +
                                       " beyond the certified overlap: " +
                                       J.rows()[0].str());
        }
    }
}

// ---------------------------------------------------------------------------
// Diagonalization under a dominating function.

struct MemberTrace {
    std::size_t member;
    std::vector<std::size_t> hits;  // indices j with x_j inside this member
};

struct DiagonalizeResult {
    std::vector<SparseVector> xs;
    std::vector<std::pair<std::size_t, std::size_t>> h_used;  // (n, h(n)) at used points
    std::vector<MemberTrace> cases;
};

/// h(n) = max(every certified pair bound, every member's extension bound at
/// n) + 1: the canonical function dominating all f's and g's of the family.
/// Values are memoized; streams are owned by the closure.
inline std::function<std::size_t(std::size_t)> dominating_h(const ADFamily& fam) {
    std::size_t F = 0;
    for (const auto& [key, c] : fam.certs()) F = std::max(F, c.bound);
    auto cache = std::make_shared<std::map<std::size_t, std::size_t>>();
    auto streams = std::make_shared<std::vector<SubspaceStream>>();
    for (std::size_t i = 0; i < fam.size(); ++i) streams->push_back(fam.stream(i));
    return [F, cache, streams](std::size_t n) {
        auto it = cache->find(n);
        if (it != cache->end()) return it->second;
        std::size_t v = F;
        for (auto& y : *streams) v = std::max(v, extend_bound(y, n));
        std::size_t h = v + 1;
        (*cache)[n] = h;
        return h;
    };
}

/// Builds the diagonal block sequence x_j = first row of Y_{j mod size} with
/// minimal support above h(previous max support), h(0) for the first pick.
///
/// Verified at every step, with the used points recorded:
///   - h dominates every member's extension bound at the used argument and
///     exceeds every certified pair bound (else the pick cannot promise the
///     dichotomy and the construction stops with the failing argument);
///   - each x_j lands in its scheduled member and in no other;
///   - finally, for every member, span(xs) ∩ Y = span of exactly the
///     scheduled hits (the finite version of the two case conclusions: a
///     member hit by the schedule keeps precisely its own picks, any other
///     member meets the span trivially).
inline DiagonalizeResult diagonalize_under(const ADFamily& fam,
                                           const std::function<std::size_t(std::size_t)>& h,
                                           std::size_t len) {
    if (fam.size() == 0)
        throw InvalidArgumentError("diagonalize_under needs a nonempty family");
    FieldSpec spec = fam.spec();
    std::size_t size = fam.size();
    std::size_t F = 0;
    for (const auto& [key, c] : fam.certs()) F = std::max(F, c.bound);
    // the family must be fully certified so cross-hits are excluded
    (void)fam.all_certs();

    std::vector<SubspaceStream> streams;
    for (std::size_t i = 0; i < size; ++i) streams.push_back(fam.stream(i));

    DiagonalizeResult out;
    for (std::size_t j = 0; j < len; ++j) {
        std::size_t arg = j == 0 ? 0 : out.xs.back().max_support();
        std::size_t hv = h(arg);
        out.h_used.emplace_back(arg, hv);
        // domination at the used point
        for (std::size_t a = 0; a < size; ++a) {
            std::size_t g = extend_bound(streams[a], arg);
            if (hv < g)
                throw PreconditionError(
                    "h(" + std::to_string(arg) + ") = " + std::to_string(hv) +
                        " fails to dominate the extension bound " + std::to_string(g) +
                        " of member " + std::to_string(a),
                    arg, std::to_string(g));
        }
        if (hv <= F)
            throw PreconditionError("h(" + std::to_string(arg) + ") = " + std::to_string(hv) +
                                        " does not clear the certified overlap bound " +
                                        std::to_string(F),
                                    arg, std::to_string(F));
        out.xs.push_back(first_row_above(streams[j % size], hv - 1));  // min supp >= hv > bounds
    }

    // hits and case conclusions
    EchelonBasis S = rref(spec, out.xs);
    for (std::size_t m = 0; m < size; ++m) {
        MemberTrace trace{m, {}};
        std::vector<SparseVector> expect;
        for (std::size_t j = 0; j < out.xs.size(); ++j)
            if (streams[m].member(out.xs[j])) {
                trace.hits.push_back(j);
                expect.push_back(out.xs[j]);
                if (j % size != m)
                    throw PreconditionError("x_" + std::to_string(j) +
                                                " crossed into unscheduled member " +
                                                std::to_string(m),
                                            j, out.xs[j].str());
            } else if (j % size == m) {
                throw PreconditionError("x_" + std::to_string(j) +
                                            " missed its scheduled member " +
                                            std::to_string(m),
                                        j, out.xs[j].str());
            }
        detail::check_span_condition(S, streams[m], rref(spec, expect), m,
                                     "diagonal case conclusion");
        out.cases.push_back(std::move(trace));
    }
    return out;
}

// ---------------------------------------------------------------------------
// The H(A) condition and the downward closure.

struct HEvidence {
    std::size_t member;
    std::vector<SparseVector> vectors;  // independent elements of span(xs) ∩ member
};

struct HCertificate {
    std::size_t depth;
    bool complete;  // found `depth` members with `depth`-dimensional evidence
    std::vector<HEvidence> members;
};

/// Finite evidence that span(xs) meets many members deeply: searches, in
/// member order, for `depth` members whose intersection with span(xs) has
/// dimension at least `depth`.  An incomplete certificate reports whatever
/// was found (the condition itself quantifies over infinitely many members
/// and is only ever certified to finite depth).
inline HCertificate in_H(const std::vector<SparseVector>& xs, const ADFamily& fam,
                         std::size_t depth) {
    HCertificate cert;
    cert.depth = depth;
    EchelonBasis S = rref(fam.spec(), xs);
    for (std::size_t m = 0; m < fam.size() && cert.members.size() < depth; ++m) {
        auto y = fam.stream(m);
        EchelonBasis I = span_intersect_stream(S, y);
        if (I.dim() >= depth) {
            HEvidence ev{m, {}};
            for (std::size_t i = 0; i < depth; ++i) ev.vectors.push_back(I.rows()[i]);
            cert.members.push_back(std::move(ev));
        }
    }
    cert.complete = cert.members.size() >= depth;
    return cert;
}

/// Independent re-check of an H-certificate: distinct members, and for each
/// one `depth` genuinely independent vectors lying in both span(xs) and the
/// member.
inline void verify_h_certificate(const ADFamily& fam, const std::vector<SparseVector>& xs,
                                 const HCertificate& cert) {
    EchelonBasis S = rref(fam.spec(), xs);
    std::vector<bool> seen(fam.size(), false);
    if (cert.complete && cert.members.size() < cert.depth)
        throw CertificateError("H-certificate claims completeness with only " +
                               std::to_string(cert.members.size()) + " members");
    for (const auto& ev : cert.members) {
        if (ev.member >= fam.size() || seen[ev.member])
            throw CertificateError("H-certificate member " + std::to_string(ev.member) +
                                   " is out of range or repeated");
        seen[ev.member] = true;
        if (ev.vectors.size() < cert.depth)
            throw CertificateError("H-certificate member " + std::to_string(ev.member) +
                                   " has too little evidence");
        auto y = fam.stream(ev.member);
        EchelonBasis indep(fam.spec());
        for (const auto& v : ev.vectors) {
            if (!S.contains(v))
                throw CertificateError("evidence vector " + v.str() +
                                       " is outside the candidate span");
            if (!y.member(v))
                throw CertificateError("evidence vector " + v.str() +
                                       " is outside member " + std::to_string(ev.member));
            if (!indep.insert(v))
                throw CertificateError("evidence for member " + std::to_string(ev.member) +
                                       " is linearly dependent");
        }
    }
}

/// Membership in the downward closure: the first member whose span contains
/// every given vector, if any.
inline std::optional<std::size_t> in_Abar(const std::vector<SparseVector>& xs,
                                          const ADFamily& fam) {
    for (std::size_t m = 0; m < fam.size(); ++m) {
        auto y = fam.stream(m);
        bool all = true;
        for (const auto& x : xs)
            if (!y.member(x)) {
                all = false;
                break;
            }
        if (all) return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Diagonalizing a descending chain against the family.

/// First row of span(X-prefix) ∩ span(Y-prefix) with pivot at least
/// min_pivot, growing both prefixes together on a doubling schedule.
/// Deterministic; nullopt when even the deepest window has nothing that high.
inline std::optional<SparseVector> intersection_row_above(SubspaceStream& X,
                                                          SubspaceStream& Y,
                                                          std::size_t min_pivot,
                                                          std::size_t start_depth,
                                                          std::size_t max_depth) {
    std::size_t w = std::max<std::size_t>(1, start_depth);
    while (true) {
        Fuel::tick();
        EchelonBasis I = intersect(X.prefix(w), Y.prefix(w));
        for (const auto& r : I.rows())
            if (r.min_support() >= min_pivot) return r;
        if (w >= max_depth) return std::nullopt;
        w = std::min(w * 2, max_depth);
    }
}

struct PDiagonalizeResult {
    std::vector<SparseVector> xs;
    std::vector<std::size_t> selected;       // members supplying the picks
    std::vector<std::size_t> chain_index;    // which chain element each pick used
    std::vector<std::size_t> member_index;   // which member each pick landed in
};

/// Diagonalizes a ⊆-descending chain X_0 ⊇ X_1 ⊇ ... against the family: a
/// block sequence with x_m drawn from span(X_m) ∩ Y_{S[m mod |S|]}, min
/// support at least max(m, previous + 1), where S lists members certified (to
/// depth h_depth) to meet the last chain element deeply.  Descent is verified
/// on the first working_depth rows of each link before anything is picked.
inline PDiagonalizeResult p_diagonalize(std::vector<SubspaceStream>& chain,
                                        const ADFamily& fam, std::size_t len,
                                        std::size_t h_depth, std::size_t working_depth) {
    if (chain.empty()) throw InvalidArgumentError("p_diagonalize needs a nonempty chain");
    // verify descent: rows of each later element lie in the earlier span
    for (std::size_t m = 1; m < chain.size(); ++m)
        for (std::size_t i = 0; i < working_depth; ++i) {
            SparseVector r = chain[m].row(i);
            if (!chain[m - 1].member(r))
                throw PreconditionError("chain element " + std::to_string(m) + " row " +
                                            std::to_string(i) +
                                            " escapes the previous element",
                                        m, r.str());
        }

    // members meeting the deepest element
    std::vector<SparseVector> last_rows;
    for (std::size_t i = 0; i < working_depth; ++i) last_rows.push_back(chain.back().row(i));
    HCertificate hc = in_H(last_rows, fam, h_depth);
    if (hc.members.empty())
        throw CertificateError(
            "no member meets the chain deeply enough at the working depth");
    PDiagonalizeResult out;
    for (const auto& ev : hc.members) out.selected.push_back(ev.member);

    for (std::size_t m = 0; m < len; ++m) {
        std::size_t ci = std::min(m, chain.size() - 1);
        std::size_t yi = out.selected[m % out.selected.size()];
        std::size_t min_pivot = std::max<std::size_t>(
            m, out.xs.empty() ? 0 : out.xs.back().max_support() + 1);
        auto ym = fam.stream(yi);
        auto row = intersection_row_above(chain[ci], ym, min_pivot, working_depth,
                                          working_depth * 8);
        if (!row)
            throw FuelExhaustedError("no intersection row with pivot >= " +
                                     std::to_string(min_pivot) + " for member " +
                                     std::to_string(yi) + " within the working depth");
        out.xs.push_back(*row);
        out.chain_index.push_back(ci);
        out.member_index.push_back(yi);
    }
    if (!is_block_sequence(out.xs))
        throw PreconditionError("diagonal picks failed to form a block sequence", 0, "");
    return out;
}

}  // namespace madvec
