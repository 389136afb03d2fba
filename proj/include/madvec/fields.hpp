#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "madvec/errors.hpp"

namespace madvec {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Which countable field scalars live in.  Two flavours: the prime fields
/// GF(p) for a prime p < 2^16, and the rationals.  Every scalar, vector and
/// basis carries its FieldSpec; mixing specs raises FieldMismatchError.
class FieldSpec {
public:
    enum class Kind { Prime, Rationals };

    static FieldSpec prime(std::uint32_t p) {
        if (p < 2 || p >= (1u << 16) || !is_prime(p))
            throw InvalidArgumentError("gf modulus must be a prime below 2^16, got " +
                                       std::to_string(p));
        return FieldSpec(Kind::Prime, p);
    }

    static FieldSpec rationals() { return FieldSpec(Kind::Rationals, 0); }

    /// Parses the command-line / JSON spelling: "gf<p>" or "q".
    static FieldSpec parse(std::string_view text) {
        if (text == "q" || text == "Q") return rationals();
        if (text.size() > 2 && text.substr(0, 2) == "gf") {
            std::uint64_t p = 0;
            for (char c : text.substr(2)) {
                if (c < '0' || c > '9')
                    throw InvalidArgumentError("bad field name: " + std::string(text));
                p = p * 10 + static_cast<std::uint64_t>(c - '0');
                if (p >= (1u << 17))
                    throw InvalidArgumentError("bad field name: " + std::string(text));
            }
            return prime(static_cast<std::uint32_t>(p));
        }
        throw InvalidArgumentError("bad field name: " + std::string(text) +
                                   " (expected gf<p> or q)");
    }

    Kind kind() const { return kind_; }
    bool is_prime_field() const { return kind_ == Kind::Prime; }
    std::uint32_t modulus() const { return p_; }

    std::string name() const {
        return kind_ == Kind::Rationals ? std::string("q") : "gf" + std::to_string(p_);
    }

    friend bool operator==(const FieldSpec& a, const FieldSpec& b) {
        return a.kind_ == b.kind_ && a.p_ == b.p_;
    }
    friend bool operator!=(const FieldSpec& a, const FieldSpec& b) { return !(a == b); }

private:
    FieldSpec(Kind k, std::uint32_t p) : kind_(k), p_(p) {}

    static bool is_prime(std::uint32_t n) {
        if (n < 2) return false;
        for (std::uint32_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

    Kind kind_;
    std::uint32_t p_;
};

inline void require_same_field(const FieldSpec& a, const FieldSpec& b, const char* where) {
    if (a != b)
        throw FieldMismatchError(std::string(where) + ": field mismatch (" + a.name() +
                                 " vs " + b.name() + ")");
}

/// An exact scalar in its field's canonical form: the residue 0..p-1 for
/// GF(p), a fully reduced fraction with positive denominator for the
/// rationals.  Canonical forms are unique, so operator== is plain value
/// comparison and serialized bytes are deterministic.
class Scalar {
public:
    explicit Scalar(FieldSpec spec) : spec_(spec), v_(init_payload(spec)) {}

    static Scalar zero(FieldSpec spec) { return Scalar(spec); }

    static Scalar one(FieldSpec spec) {
        Scalar s(spec);
        if (spec.is_prime_field())
            s.v_ = std::uint32_t{1};
        else
            s.v_ = BigRational(1);
        return s;
    }

    /// Embeds an integer: reduced mod p, or as the rational n/1.
    static Scalar from_integer(FieldSpec spec, long long n) {
        Scalar s(spec);
        if (spec.is_prime_field()) {
            long long p = spec.modulus();
            long long r = n % p;
            if (r < 0) r += p;
            s.v_ = static_cast<std::uint32_t>(r);
        } else {
            s.v_ = BigRational(n);
        }
        return s;
    }

    /// Rational a/b in lowest terms; only meaningful over the rationals.
    static Scalar fraction(FieldSpec spec, const BigInt& num, const BigInt& den) {
        if (spec.is_prime_field())
            throw InvalidArgumentError("fractions only exist over the rationals");
        if (den == 0) throw DivisionByZeroError("fraction with zero denominator");
        Scalar s(spec);
        BigInt n = num, d = den;
        if (d < 0) { n = -n; d = -d; }  // cpp_rational wants a positive denominator
        s.v_ = BigRational(n, d);       // reduces to lowest terms
        return s;
    }

    const FieldSpec& spec() const { return spec_; }

    bool is_zero() const {
        if (spec_.is_prime_field()) return std::get<std::uint32_t>(v_) == 0;
        return std::get<BigRational>(v_) == 0;
    }

    bool is_one() const {
        if (spec_.is_prime_field()) return std::get<std::uint32_t>(v_) == 1;
        return std::get<BigRational>(v_) == 1;
    }

    std::uint32_t residue() const {
        if (!spec_.is_prime_field())
            throw InvalidArgumentError("residue() on a rational scalar");
        return std::get<std::uint32_t>(v_);
    }

    const BigRational& rational() const {
        if (spec_.is_prime_field())
            throw InvalidArgumentError("rational() on a prime-field scalar");
        return std::get<BigRational>(v_);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        require_same_field(a.spec_, b.spec_, "scalar +");
        Scalar r(a.spec_);
        if (a.spec_.is_prime_field()) {
            std::uint64_t s = std::uint64_t(a.residue()) + b.residue();
            r.v_ = static_cast<std::uint32_t>(s % a.spec_.modulus());
        } else {
            r.v_ = BigRational(a.rational() + b.rational());
        }
        return r;
    }

    friend Scalar operator-(const Scalar& a) {
        Scalar r(a.spec_);
        if (a.spec_.is_prime_field()) {
            std::uint32_t p = a.spec_.modulus();
            std::uint32_t v = a.residue();
            r.v_ = v == 0 ? 0u : p - v;
        } else {
            r.v_ = BigRational(-a.rational());
        }
        return r;
    }

    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        require_same_field(a.spec_, b.spec_, "scalar *");
        Scalar r(a.spec_);
        if (a.spec_.is_prime_field()) {
            std::uint64_t m = std::uint64_t(a.residue()) * b.residue();
            r.v_ = static_cast<std::uint32_t>(m % a.spec_.modulus());
        } else {
            r.v_ = BigRational(a.rational() * b.rational());
        }
        return r;
    }

    Scalar inverse() const {
        if (is_zero()) throw DivisionByZeroError("inverse of zero");
        Scalar r(spec_);
        if (spec_.is_prime_field()) {
            r.v_ = mod_inverse(residue(), spec_.modulus());
        } else {
            r.v_ = BigRational(1 / rational());
        }
        return r;
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        require_same_field(a.spec_, b.spec_, "scalar /");
        return a * b.inverse();
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.spec_ != b.spec_) return false;
        return a.v_ == b.v_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// Text encoding: decimal residue for GF(p); "a/b" over the rationals with
    /// "/b" omitted when the denominator is 1.
    std::string str() const {
        if (spec_.is_prime_field()) return std::to_string(residue());
        const BigRational& q = std::get<BigRational>(v_);
        std::string s = numerator(q).str();
        if (denominator(q) != 1) s += "/" + denominator(q).str();
        return s;
    }

    static Scalar parse(FieldSpec spec, std::string_view text) {
        if (text.empty()) throw InvalidArgumentError("empty scalar literal");
        if (spec.is_prime_field()) {
            bool neg = false;
            std::size_t i = 0;
            if (text[0] == '-') { neg = true; i = 1; }
            if (i == text.size()) throw InvalidArgumentError("bad scalar literal: " + std::string(text));
            std::uint64_t acc = 0;
            std::uint32_t p = spec.modulus();
            for (; i < text.size(); ++i) {
                char c = text[i];
                if (c < '0' || c > '9')
                    throw InvalidArgumentError("bad scalar literal: " + std::string(text));
                acc = (acc * 10 + std::uint64_t(c - '0')) % p;
            }
            std::uint32_t r = static_cast<std::uint32_t>(acc);
            if (neg && r != 0) r = p - r;
            Scalar s(spec);
            s.v_ = r;
            return s;
        }
        std::size_t slash = text.find('/');
        try {
            if (slash == std::string_view::npos) {
                Scalar s(spec);
                s.v_ = BigRational(BigInt(std::string(text)));
                return s;
            }
            BigInt num{std::string(text.substr(0, slash))};
            BigInt den{std::string(text.substr(slash + 1))};
            return fraction(spec, num, den);
        } catch (const std::exception& e) {
            if (dynamic_cast<const Error*>(&e)) throw;
            throw InvalidArgumentError("bad scalar literal: " + std::string(text));
        }
    }

private:
    using Payload = std::variant<std::uint32_t, BigRational>;

    static Payload init_payload(const FieldSpec& spec) {
        if (spec.is_prime_field()) return std::uint32_t{0};
        return BigRational(0);
    }

    // Extended Euclid on int64; p prime, 0 < a < p.
    static std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t p) {
        std::int64_t t = 0, new_t = 1;
        std::int64_t r = p, new_r = a;
        while (new_r != 0) {
            std::int64_t q = r / new_r;
            std::int64_t tmp = t - q * new_t;
            t = new_t; new_t = tmp;
            tmp = r - q * new_r;
            r = new_r; new_r = tmp;
        }
        // r == gcd == 1 because p is prime and a != 0 mod p
        if (t < 0) t += p;
        return static_cast<std::uint32_t>(t);
    }

    FieldSpec spec_;
    Payload v_;
};

}  // namespace madvec
