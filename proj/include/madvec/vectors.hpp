#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "madvec/fields.hpp"

namespace madvec {

/// A finitely supported vector in E = the direct sum of countably many copies
/// of the field: a sorted list of (coordinate index, nonzero coefficient)
/// pairs.  The representation is canonical (strictly increasing indices, no
/// zero coefficients) so equality is entrywise comparison.
class SparseVector {
public:
    using Entry = std::pair<std::size_t, Scalar>;

    explicit SparseVector(FieldSpec spec) : spec_(spec) {}

    /// Builds from entries in any order; adds duplicate indices together and
    /// drops zeros, producing the canonical form.
    static SparseVector make(FieldSpec spec, std::vector<Entry> entries) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Entry& a, const Entry& b) { return a.first < b.first; });
        SparseVector v(spec);
        for (auto& e : entries) {
            require_same_field(spec, e.second.spec(), "vector entry");
            if (!v.entries_.empty() && v.entries_.back().first == e.first) {
                v.entries_.back().second = v.entries_.back().second + e.second;
                if (v.entries_.back().second.is_zero()) v.entries_.pop_back();
            } else if (!e.second.is_zero()) {
                v.entries_.emplace_back(e.first, std::move(e.second));
            }
        }
        return v;
    }

    /// The standard basis vector e_n.
    static SparseVector unit(FieldSpec spec, std::size_t n) {
        SparseVector v(spec);
        v.entries_.emplace_back(n, Scalar::one(spec));
        return v;
    }

    const FieldSpec& spec() const { return spec_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        s.reserve(entries_.size());
        for (const auto& e : entries_) s.push_back(e.first);
        return s;
    }

    std::size_t min_support() const {
        if (is_zero()) throw ZeroVectorError("min_support of the zero vector");
        return entries_.front().first;
    }

    std::size_t max_support() const {
        if (is_zero()) throw ZeroVectorError("max_support of the zero vector");
        return entries_.back().first;
    }

    /// Coefficient at index i (zero when absent).
    Scalar coeff(std::size_t i) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                                   [](const Entry& e, std::size_t x) { return e.first < x; });
        if (it != entries_.end() && it->first == i) return it->second;
        return Scalar::zero(spec_);
    }

    SparseVector scaled(const Scalar& c) const {
        require_same_field(spec_, c.spec(), "vector scale");
        SparseVector r(spec_);
        if (c.is_zero()) return r;
        r.entries_.reserve(entries_.size());
        for (const auto& e : entries_) r.entries_.emplace_back(e.first, e.second * c);
        return r;
    }

    friend SparseVector operator+(const SparseVector& a, const SparseVector& b) {
        require_same_field(a.spec_, b.spec_, "vector +");
        SparseVector r(a.spec_);
        r.entries_.reserve(a.entries_.size() + b.entries_.size());
        std::size_t i = 0, j = 0;
        while (i < a.entries_.size() || j < b.entries_.size()) {
            if (j == b.entries_.size() ||
                (i < a.entries_.size() && a.entries_[i].first < b.entries_[j].first)) {
                r.entries_.push_back(a.entries_[i++]);
            } else if (i == a.entries_.size() || b.entries_[j].first < a.entries_[i].first) {
                r.entries_.push_back(b.entries_[j++]);
            } else {
                Scalar c = a.entries_[i].second + b.entries_[j].second;
                if (!c.is_zero()) r.entries_.emplace_back(a.entries_[i].first, c);
                ++i; ++j;
            }
        }
        return r;
    }

    friend SparseVector operator-(const SparseVector& a, const SparseVector& b) {
        return a + b.scaled(-Scalar::one(b.spec_));
    }

    /// a + c*b in one pass; the workhorse of row reduction.
    SparseVector axpy(const Scalar& c, const SparseVector& b) const {
        return *this + b.scaled(c);
    }

    /// Shift every index up by delta (used by the stacked intersection system).
    SparseVector shifted(std::size_t delta) const {
        SparseVector r(spec_);
        r.entries_.reserve(entries_.size());
        for (const auto& e : entries_) r.entries_.emplace_back(e.first + delta, e.second);
        return r;
    }

    /// Keep only indices in [lo, hi); used to split stacked rows back apart.
    SparseVector sliced(std::size_t lo, std::size_t hi) const {
        SparseVector r(spec_);
        for (const auto& e : entries_)
            if (e.first >= lo && e.first < hi) r.entries_.push_back(e);
        return r;
    }

    friend bool operator==(const SparseVector& a, const SparseVector& b) {
        return a.spec_ == b.spec_ && a.entries_ == b.entries_;
    }
    friend bool operator!=(const SparseVector& a, const SparseVector& b) { return !(a == b); }

    /// Debug / error-message rendering: "e0 + 2*e3" style.
    std::string str() const {
        if (is_zero()) return "0";
        std::string s;
        for (const auto& e : entries_) {
            if (!s.empty()) s += " + ";
            if (!e.second.is_one()) s += e.second.str() + "*";
            s += "e" + std::to_string(e.first);
        }
        return s;
    }

private:
    FieldSpec spec_;
    std::vector<Entry> entries_;
};

/// Block order: x < y iff max(supp x) < min(supp y).  Only a partial order;
/// both arguments must be nonzero.
inline bool block_lt(const SparseVector& x, const SparseVector& y) {
    require_same_field(x.spec(), y.spec(), "block_lt");
    return x.max_support() < y.min_support();
}

/// True when consecutive vectors are strictly block-ordered (so supports are
/// pairwise disjoint and increasing).  The empty and singleton lists qualify;
/// any zero vector disqualifies.
inline bool is_block_sequence(const std::vector<SparseVector>& xs) {
    for (const auto& x : xs)
        if (x.is_zero()) return false;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!block_lt(xs[i], xs[i + 1])) return false;
    return true;
}

/// Exact linear combination sum c_i * x_i.  The field must be passed
/// explicitly so the empty combination still knows where 0 lives.
inline SparseVector vec_combine(FieldSpec spec,
                                const std::vector<std::pair<Scalar, SparseVector>>& terms) {
    SparseVector acc(spec);
    for (const auto& [c, x] : terms) {
        require_same_field(spec, c.spec(), "vec_combine");
        require_same_field(spec, x.spec(), "vec_combine");
        acc = acc.axpy(c, x);
    }
    return acc;
}

/// min(supp x) > M, i.e. x lies in the tail E/M.  Zero has no support and is
/// rejected.
inline bool above(const SparseVector& x, std::size_t M) {
    return x.min_support() > M;
}

}  // namespace madvec
