#include "bincover/rational.hpp"

#include <cctype>

namespace bincover {

Rational Rational::parse(const std::string& s) {
    if (s.empty()) throw ValidationError("empty rational literal");
    auto digits = [](const std::string& t, size_t from, size_t to) {
        if (from >= to) return false;
        for (size_t i = from; i < to; ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    size_t start = 0;
    if (s[0] == '-') start = 1;
    size_t slash = s.find('/');
    if (slash == std::string::npos) {
        if (!digits(s, start, s.size()))
            throw ValidationError("malformed rational literal: '" + s + "'");
        return Rational(mpq_class(mpz_class(s), 1));
    }
    if (!digits(s, start, slash) || !digits(s, slash + 1, s.size()))
        throw ValidationError("malformed rational literal: '" + s + "'");
    mpz_class num(s.substr(0, slash));
    mpz_class den(s.substr(slash + 1));
    if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
    return Rational(num, den);
}

std::string Rational::str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

size_t Rational::hash() const {
    auto mix = [](size_t h, size_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    };
    auto hash_mpz = [&](const mpz_class& z) {
        size_t h = static_cast<size_t>(mpz_sgn(z.get_mpz_t()));
        size_t n = mpz_size(z.get_mpz_t());
        for (size_t i = 0; i < n; ++i)
            h = mix(h, static_cast<size_t>(mpz_getlimbn(z.get_mpz_t(), i)));
        return h;
    };
    return mix(hash_mpz(q_.get_num()), hash_mpz(q_.get_den()));
}

std::optional<std::uint64_t> to_u64(const mpz_class& n) {
    if (mpz_sgn(n.get_mpz_t()) < 0) return std::nullopt;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) > 64) return std::nullopt;
    std::uint64_t v = 0;
    mpz_class tmp = n;
    for (int shift = 0; shift < 64 && tmp != 0; shift += 32) {
        v |= static_cast<std::uint64_t>(mpz_get_ui(tmp.get_mpz_t()) & 0xffffffffULL) << shift;
        tmp >>= 32;
    }
    return v;
}

} // namespace bincover
