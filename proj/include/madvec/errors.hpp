#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace madvec {

/// Base class for every error raised by the library.  Callers that want to
/// distinguish failure modes catch the concrete subclasses below; callers that
/// only care about "this input was rejected" catch Error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Two scalars (or vectors, bases, streams...) from different fields met.
class FieldMismatchError : public Error {
public:
    using Error::Error;
};

/// Division by the zero scalar, or inversion of it.
class DivisionByZeroError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid input: non-prime modulus, unsorted vector entries,
/// malformed preset, bad JSON shape, and the like.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// An operation that needs a nonzero vector (block comparison, pivot) got 0.
class ZeroVectorError : public Error {
public:
    using Error::Error;
};

/// A stated mathematical precondition failed.  Carries the index of the
/// offending object and a printable witness so the caller can see why.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, std::size_t index, std::string witness)
        : Error(what), index_(index), witness_(std::move(witness)) {}

    std::size_t index() const { return index_; }
    const std::string& witness() const { return witness_; }

private:
    std::size_t index_;
    std::string witness_;
};

/// A disjointness certificate is missing, fails re-verification, or is too
/// shallow for the requested operation.
class CertificateError : public Error {
public:
    using Error::Error;
};

/// A stream produced rows violating the cumulative reduced-echelon invariant.
class StreamInvariantError : public Error {
public:
    using Error::Error;
};

/// Canonicalization consumed its raw producer completely: the input only
/// spanned a finite-dimensional space, so no infinite stream exists.
class FiniteInputError : public Error {
public:
    using Error::Error;
};

/// The global step budget (MADVEC_MAX_STEPS) was exhausted mid-search.
class FuelExhaustedError : public Error {
public:
    using Error::Error;
};

/// A game move broke the rules.  Carries who moved and in which round.
class IllegalMoveError : public Error {
public:
    IllegalMoveError(const std::string& what, int player, std::size_t round)
        : Error(what), player_(player), round_(round) {}

    int player() const { return player_; }       // 1 or 2
    std::size_t round() const { return round_; }

private:
    int player_;
    std::size_t round_;
};

/// A finite-union decomposition failed.  Carries the block that could not be
/// matched.
class DecompositionError : public Error {
public:
    DecompositionError(const std::string& what, std::size_t block_index, std::string block)
        : Error(what), block_index_(block_index), block_(std::move(block)) {}

    std::size_t block_index() const { return block_index_; }
    const std::string& block() const { return block_; }

private:
    std::size_t block_index_ = 0;
    std::string block_;
};

}  // namespace madvec
