#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "bincover/errors.hpp"

namespace bincover {

// Exact rational number, always in lowest terms with positive denominator.
// Thin value wrapper around GMP's mpq so every arithmetic path stays exact;
// no operation here ever rounds.
class Rational {
  public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}
    Rational(long n, long d) : q_(n, d) {
        if (d == 0) throw ValidationError("zero denominator");
        q_.canonicalize();
    }
    Rational(const mpz_class& n, const mpz_class& d) : q_(n, d) {
        if (d == 0) throw ValidationError("zero denominator");
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    // Parses "p/q" or "p" with optional leading minus; rejects anything else.
    static Rational parse(const std::string& s);

    // Exact conversion: every double is a rational.
    static Rational from_double(double d) {
        mpq_class q;
        mpq_set_d(q.get_mpq_t(), d);
        return Rational(q);
    }

    std::string str() const;
    double as_double() const { return q_.get_d(); }

    const mpz_class& num() const { return q_.get_num(); }
    const mpz_class& den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    // Largest integer <= value.
    mpz_class floor() const {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
        return r;
    }

    Rational abs() const { return Rational(mpq_class(::abs(q_))); }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw ValidationError("division by zero");
        return Rational(mpq_class(a.q_ / b.q_));
    }
    Rational operator-() const { return Rational(mpq_class(-q_)); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw ValidationError("division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) >= 0; }

    const mpq_class& raw() const { return q_; }

    size_t hash() const;

  private:
    mpq_class q_;
};

inline Rational pow_rational(const Rational& base, unsigned long e) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), base.num().get_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), base.den().get_mpz_t(), e);
    return Rational(n, d);
}

// lcm of two positive integers.
inline mpz_class lcm(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Value of n as uint64 if it fits, otherwise nullopt.
std::optional<std::uint64_t> to_u64(const mpz_class& n);

} // namespace bincover

template <>
struct std::hash<bincover::Rational> {
    size_t operator()(const bincover::Rational& r) const noexcept { return r.hash(); }
};
