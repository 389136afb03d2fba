#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "madvec/vectors.hpp"

namespace madvec {

/// A finite subspace presented by its unique reduced echelon basis with
/// leftmost pivots:
///   - each row's pivot is its minimal support index,
///   - pivots are strictly increasing down the rows,
///   - every pivot coefficient is 1,
///   - every pivot column is zero in all other rows.
/// Two bases are equal iff they present the same subspace, so operator== is
/// row-by-row comparison.
class EchelonBasis {
public:
    explicit EchelonBasis(FieldSpec spec) : spec_(spec) {}

    /// Validating factory for externally supplied rows (JSON loads, recorded
    /// game moves).  Rejects anything that is not already in reduced form.
    static EchelonBasis from_rows(FieldSpec spec, std::vector<SparseVector> rows) {
        EchelonBasis b(spec);
        for (auto& r : rows) {
            require_same_field(spec, r.spec(), "echelon row");
            if (r.is_zero()) throw InvalidArgumentError("echelon basis contains a zero row");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].coeff(rows[i].min_support()).is_one())
                throw InvalidArgumentError("row " + std::to_string(i) +
                                           " is not pivot-normalized: " + rows[i].str());
            if (i + 1 < rows.size() && rows[i].min_support() >= rows[i + 1].min_support())
                throw InvalidArgumentError("pivots not strictly increasing at row " +
                                           std::to_string(i + 1));
        }
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < rows.size(); ++j)
                if (i != j && !rows[j].coeff(rows[i].min_support()).is_zero())
                    throw InvalidArgumentError("pivot column " +
                                               std::to_string(rows[i].min_support()) +
                                               " not cleared in row " + std::to_string(j));
        b.rows_ = std::move(rows);
        return b;
    }

    const FieldSpec& spec() const { return spec_; }
    const std::vector<SparseVector>& rows() const { return rows_; }
    std::size_t dim() const { return rows_.size(); }
    std::size_t pivot(std::size_t i) const { return rows_[i].min_support(); }

    /// Largest support index over all rows; nullopt for the zero space.
    std::optional<std::size_t> max_support() const {
        std::optional<std::size_t> m;
        for (const auto& r : rows_) {
            std::size_t s = r.max_support();
            if (!m || s > *m) m = s;
        }
        return m;
    }

    /// Reduces v against the rows.  Returns the remainder and, when wanted,
    /// the coefficients used (coeffs[i] is the multiple of row i appearing in
    /// v - remainder).  One increasing-pivot pass suffices because the basis
    /// is fully reduced: subtracting a later row cannot reintroduce an earlier
    /// pivot column.
    SparseVector reduce(const SparseVector& v, std::vector<Scalar>* coeffs = nullptr) const {
        require_same_field(spec_, v.spec(), "reduce");
        if (coeffs) coeffs->assign(rows_.size(), Scalar::zero(spec_));
        SparseVector r = v;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (r.is_zero()) break;
            Scalar c = r.coeff(rows_[i].min_support());
            if (c.is_zero()) continue;
            r = r.axpy(-c, rows_[i]);
            if (coeffs) (*coeffs)[i] = c;
        }
        return r;
    }

    /// Membership test with certificate: the unique coefficients expressing x
    /// in the basis, or nullopt when x is outside.  The zero vector yields the
    /// empty coefficient list.
    std::optional<std::vector<Scalar>> member(const SparseVector& x) const {
        if (x.is_zero()) return std::vector<Scalar>{};
        std::vector<Scalar> coeffs;
        SparseVector r = reduce(x, &coeffs);
        if (!r.is_zero()) return std::nullopt;
        return coeffs;
    }

    bool contains(const SparseVector& x) const { return reduce(x).is_zero(); }

    /// Inserts a vector, restoring the reduced invariant.  Returns true when
    /// the dimension grew (v was independent).
    bool insert(const SparseVector& v) {
        SparseVector r = reduce(v);
        if (r.is_zero()) return false;
        r = r.scaled(r.coeff(r.min_support()).inverse());
        std::size_t p = r.min_support();
        // Clear the new pivot column from earlier rows (later rows cannot
        // touch it: their pivots, hence entire supports, sit above p).
        for (auto& row : rows_) {
            Scalar c = row.coeff(p);
            if (!c.is_zero()) row = row.axpy(-c, r);
        }
        auto it = rows_.begin();
        while (it != rows_.end() && it->min_support() < p) ++it;
        rows_.insert(it, std::move(r));
        return true;
    }

    friend bool operator==(const EchelonBasis& a, const EchelonBasis& b) {
        return a.spec_ == b.spec_ && a.rows_ == b.rows_;
    }
    friend bool operator!=(const EchelonBasis& a, const EchelonBasis& b) { return !(a == b); }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i) s += ", ";
            s += rows_[i].str();
        }
        return s + "}";
    }

private:
    FieldSpec spec_;
    std::vector<SparseVector> rows_;
};

/// Canonical reduced echelon basis of the span of arbitrary vectors.
inline EchelonBasis rref(FieldSpec spec, const std::vector<SparseVector>& vectors) {
    EchelonBasis b(spec);
    for (const auto& v : vectors) {
        require_same_field(spec, v.spec(), "rref");
        b.insert(v);
    }
    return b;
}

/// span(U) + span(V) as a canonical basis.
inline EchelonBasis sum_space(const EchelonBasis& U, const EchelonBasis& V) {
    require_same_field(U.spec(), V.spec(), "sum_space");
    EchelonBasis b = U;
    for (const auto& v : V.rows()) b.insert(v);
    return b;
}

/// span(U) ∩ span(V) as a canonical basis, via the kernel of the stacked
/// coefficient system: reduce rows (u | u) for u in U and (v | 0) for v in V,
/// where the right block lives on indices shifted by S.  A dependency
/// Σ a_i u_i + Σ b_j v_j = 0 leaves a row whose left block is zero and whose
/// right block is Σ a_i u_i, an intersection element; every intersection
/// element arises this way, and the count is dim U + dim V - dim(U+V).
inline EchelonBasis intersect(const EchelonBasis& U, const EchelonBasis& V) {
    require_same_field(U.spec(), V.spec(), "intersect");
    std::size_t S = 0;
    if (auto m = U.max_support()) S = std::max(S, *m + 1);
    if (auto m = V.max_support()) S = std::max(S, *m + 1);
    EchelonBasis stacked(U.spec());
    for (const auto& u : U.rows()) stacked.insert(u + u.shifted(S));
    for (const auto& v : V.rows()) stacked.insert(v);
    std::vector<SparseVector> inter;
    for (const auto& row : stacked.rows())
        if (row.min_support() >= S) {
            std::vector<SparseVector::Entry> es;
            for (const auto& e : row.entries()) es.emplace_back(e.first - S, e.second);
            inter.push_back(SparseVector::make(U.spec(), std::move(es)));
        }
    return rref(U.spec(), inter);
}

}  // namespace madvec
