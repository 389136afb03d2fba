#pragma once

// Finite-union combinatorics of blocks of naturals, and the two-way bridge
// between block sequences of vectors and their support sequences: any
// admissible block-set sequence A lifts to a vector block sequence inside
// <X> whose supports are exactly A, and singleton supports reflect back to
// basis vectors of <X>.

#include <algorithm>
#include <cstddef>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "madvec/echelon.hpp"
#include "madvec/errors.hpp"
#include "madvec/fuel.hpp"
#include "madvec/vectors.hpp"

namespace madvec {

// A nonempty finite set of naturals, stored sorted and deduplicated.
class FinBlock {
public:
    static FinBlock make(std::vector<std::size_t> elements) {
        if (elements.empty()) throw InvalidArgumentError("a block must be a nonempty set");
        std::sort(elements.begin(), elements.end());
        elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
        FinBlock b;
        b.elements_ = std::move(elements);
        return b;
    }

    const std::vector<std::size_t>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    std::size_t min() const { return elements_.front(); }
    std::size_t max() const { return elements_.back(); }

    bool contains(std::size_t n) const {
        return std::binary_search(elements_.begin(), elements_.end(), n);
    }

    bool subset_of(const FinBlock& other) const {
        return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                             elements_.end());
    }

    bool intersects(const FinBlock& other) const {
        auto it = elements_.begin();
        auto jt = other.elements_.begin();
        while (it != elements_.end() && jt != other.elements_.end()) {
            if (*it == *jt) return true;
            if (*it < *jt) ++it;
            else ++jt;
        }
        return false;
    }

    // Union of two blocks; no disjointness requirement.
    FinBlock merged(const FinBlock& other) const {
        std::vector<std::size_t> out;
        out.reserve(elements_.size() + other.elements_.size());
        std::set_union(elements_.begin(), elements_.end(), other.elements_.begin(),
                       other.elements_.end(), std::back_inserter(out));
        return make(std::move(out));
    }

    bool operator==(const FinBlock& other) const { return elements_ == other.elements_; }
    bool operator!=(const FinBlock& other) const { return !(*this == other); }
    // Order by (min, then lexicographic) so listings are deterministic.
    bool operator<(const FinBlock& other) const { return elements_ < other.elements_; }

    std::string str() const {
        std::ostringstream os;
        os << '{';
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (i) os << ',';
            os << elements_[i];
        }
        os << '}';
        return os.str();
    }

private:
    std::vector<std::size_t> elements_;
};

// A finite prefix of a block sequence of sets: consecutive blocks are
// separated, max of each strictly below min of the next.
class FinBlockSeq {
public:
    static FinBlockSeq make(std::vector<FinBlock> blocks) {
        for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
            if (blocks[i].max() >= blocks[i + 1].min())
                throw InvalidArgumentError("blocks must be strictly ordered: " + blocks[i].str() +
                                           " does not lie below " + blocks[i + 1].str());
        FinBlockSeq s;
        s.blocks_ = std::move(blocks);
        return s;
    }

    const std::vector<FinBlock>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    const FinBlock& block(std::size_t i) const { return blocks_.at(i); }

    bool operator==(const FinBlockSeq& other) const { return blocks_ == other.blocks_; }
    bool operator!=(const FinBlockSeq& other) const { return !(*this == other); }

    std::string str() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            if (i) os << ", ";
            os << blocks_[i].str();
        }
        os << ')';
        return os.str();
    }

private:
    std::vector<FinBlock> blocks_;
};

// All unions of nonempty subsets of the first `upto` blocks, in sorted
// order. Distinct subsets give distinct unions because the blocks are
// pairwise disjoint, so the result has exactly 2^upto - 1 elements.
inline std::vector<FinBlock> fu_enum(const FinBlockSeq& A, std::size_t upto) {
    if (upto > A.size())
        throw InvalidArgumentError("fu_enum: asked for the first " + std::to_string(upto) +
                                   " blocks of a sequence of length " + std::to_string(A.size()));
    if (upto >= 8 * sizeof(std::size_t))
        throw InvalidArgumentError("fu_enum: union count overflows");
    std::vector<FinBlock> out;
    out.reserve((std::size_t{1} << upto) - 1);
    for (std::size_t mask = 1; mask < (std::size_t{1} << upto); ++mask) {
        Fuel::tick();
        std::vector<std::size_t> elems;
        for (std::size_t i = 0; i < upto; ++i)
            if (mask & (std::size_t{1} << i))
                elems.insert(elems.end(), A.block(i).elements().begin(),
                             A.block(i).elements().end());
        out.push_back(FinBlock::make(std::move(elems)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// The complete list of common finite unions all of whose elements are below
// `cutoff`. Complete because any such union is built from blocks that lie
// entirely below the cutoff, and those form a prefix of each sequence.
inline std::vector<FinBlock> fin_ad_report(const FinBlockSeq& A, const FinBlockSeq& B,
                                           std::size_t cutoff) {
    auto prefix_below = [cutoff](const FinBlockSeq& S) {
        std::size_t k = 0;
        while (k < S.size() && S.block(k).max() < cutoff) ++k;
        return k;
    };
    auto fa = fu_enum(A, prefix_below(A));
    auto fb = fu_enum(B, prefix_below(B));
    std::vector<FinBlock> out;
    std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(out));
    return out;
}

// The blockwise support sequence of a vector block sequence.
inline FinBlockSeq supp_of_blockseq(const std::vector<SparseVector>& X) {
    if (!is_block_sequence(X))
        throw InvalidArgumentError("supp_of_blockseq: input is not a block sequence");
    std::vector<FinBlock> blocks;
    blocks.reserve(X.size());
    for (const auto& x : X) blocks.push_back(FinBlock::make(x.support()));
    return FinBlockSeq::make(std::move(blocks));
}

// The points covered by singleton blocks of the prefix.
inline std::vector<std::size_t> e_a(const FinBlockSeq& A) {
    std::vector<std::size_t> out;
    for (const auto& b : A.blocks())
        if (b.size() == 1) out.push_back(b.min());
    return out;
}

// Finite report on the two hypotheses a family of support sequences is
// asked to satisfy: each singleton-point set should be spread out (it must
// be coinfinite — only a window density can be inspected), and the
// singleton-point sets of distinct members should meet in a finite set.
struct BGAMemberReport {
    std::size_t member = 0;
    std::vector<std::size_t> points;   // singleton points below the window
    std::size_t complement_size = 0;   // window positions not covered
};

struct BGAPairReport {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<std::size_t> common;  // shared singleton points below the window
    bool overlap_flagged = false;
};

struct BGAReport {
    std::size_t depth = 0;
    std::vector<BGAMemberReport> members;
    std::vector<BGAPairReport> pairs;
};

inline BGAReport bga_hypotheses(const std::vector<FinBlockSeq>& fams, std::size_t depth) {
    BGAReport report;
    report.depth = depth;
    std::vector<std::vector<std::size_t>> windows;
    for (std::size_t m = 0; m < fams.size(); ++m) {
        Fuel::tick();
        std::vector<std::size_t> pts;
        for (std::size_t n : e_a(fams[m]))
            if (n < depth) pts.push_back(n);
        BGAMemberReport mr;
        mr.member = m;
        mr.complement_size = depth - pts.size();
        mr.points = pts;
        windows.push_back(std::move(pts));
        report.members.push_back(std::move(mr));
    }
    for (std::size_t i = 0; i < fams.size(); ++i)
        for (std::size_t j = i + 1; j < fams.size(); ++j) {
            Fuel::tick();
            BGAPairReport pr;
            pr.i = i;
            pr.j = j;
            std::set_intersection(windows[i].begin(), windows[i].end(), windows[j].begin(),
                                  windows[j].end(), std::back_inserter(pr.common));
            pr.overlap_flagged = !pr.common.empty();
            report.pairs.push_back(std::move(pr));
        }
    return report;
}

// Lift a support sequence back through a vector block sequence: block a_j
// must be a union of supports of X (unique decomposition, since those
// supports are pairwise disjoint and ordered), and y_j is the sum of the
// corresponding x_n. Supports never cancel across disjoint vectors, so
// supp(y_j) = a_j exactly and each y_j lies in <X>.
inline std::vector<SparseVector> lift_supp(const std::vector<SparseVector>& X,
                                           const FinBlockSeq& A) {
    FinBlockSeq SX = supp_of_blockseq(X);
    if (X.empty() && A.size() > 0)
        throw DecompositionError("cannot decompose any block over an empty sequence", 0,
                                 A.block(0).str());
    std::vector<SparseVector> Y;
    Y.reserve(A.size());
    for (std::size_t j = 0; j < A.size(); ++j) {
        Fuel::tick();
        const FinBlock& a = A.block(j);
        std::vector<std::size_t> parts;
        std::size_t covered = 0;
        for (std::size_t n = 0; n < X.size(); ++n) {
            if (SX.block(n).subset_of(a)) {
                parts.push_back(n);
                covered += SX.block(n).size();
            }
        }
        if (covered != a.size())
            throw DecompositionError("block " + a.str() +
                                         " is not a union of supports of the sequence",
                                     j, a.str());
        SparseVector y = X[parts.front()];
        for (std::size_t t = 1; t < parts.size(); ++t) y = y + X[parts[t]];
        Y.push_back(std::move(y));
    }
    if (!is_block_sequence(Y))
        throw DecompositionError("lifted sequence is not in block order", 0,
                                 A.size() ? A.block(0).str() : "()");
    return Y;
}

}  // namespace madvec
