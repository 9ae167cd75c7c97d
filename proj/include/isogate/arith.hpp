#pragma once

// Exact integers, rationals and elements of real/imaginary quadratic fields.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isogate {

using Integer = mpz_class;
using Rational = mpq_class;

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

inline Rational make_rational(const Integer& num, const Integer& den = 1) {
    if (den == 0) throw Error("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "num" or "num/den" in decimal, with optional sign on the numerator.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n')) s.pop_back();
    std::size_t start = s.find_first_not_of(' ');
    if (start == std::string::npos) throw ParseError("empty rational");
    s = s.substr(start);
    auto valid_int = [](const std::string& t, bool allow_sign) {
        if (t.empty()) return false;
        std::size_t i = 0;
        if (allow_sign && (t[0] == '-' || t[0] == '+')) i = 1;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    std::size_t slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false))
        throw ParseError("malformed rational '" + s + "'");
    if (num[0] == '+') num = num.substr(1);
    Integer n(num, 10), d(den, 10);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    return make_rational(n, d);
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rational rpow(const Rational& base, unsigned long e) {
    return make_rational(ipow(base.get_num(), e), ipow(base.get_den(), e));
}

inline Integer igcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Integer ilcm(const Integer& a, const Integer& b) {
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

/// Remainder in [0, m).
inline Integer imod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

/// Representative in (-m/2, m/2].
inline Integer symmetric_mod(const Integer& a, const Integer& m) {
    Integer r = imod(a, m);
    if (2 * r > m) r -= m;
    return r;
}

inline std::uint64_t mod_u64(const Integer& a, std::uint64_t m) {
    Integer r;
    mpz_fdiv_r_ui(r.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(m));
    return r.get_ui();
}

inline bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL})
        if (n % d == 0) return n == d;
    for (std::uint64_t d = 17; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::uint64_t next_prime(std::uint64_t n) {
    std::uint64_t c = n + 1;
    while (!is_prime_u64(c)) ++c;
    return c;
}

/// Prime factorization of a machine integer by trial division.
inline std::vector<std::pair<std::uint64_t, int>> factor_u64(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

/// Squarefree part of a nonzero integer, sign kept.
inline Integer squarefree_part(const Integer& n) {
    if (n == 0) throw Error("squarefree part of zero");
    Integer a = abs(n);
    Integer out = 1;
    Integer p = 2;
    while (p * p <= a) {
        int e = 0;
        while (mpz_divisible_p(a.get_mpz_t(), p.get_mpz_t())) {
            a /= p;
            ++e;
        }
        if (e % 2) out *= p;
        p += (p == 2) ? 1 : 2;
    }
    out *= a;
    return n < 0 ? Integer(-out) : out;
}

inline std::optional<Integer> exact_sqrt(const Integer& n) {
    if (n < 0) return std::nullopt;
    if (!mpz_perfect_square_p(n.get_mpz_t())) return std::nullopt;
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

inline std::optional<Rational> exact_sqrt(const Rational& q) {
    auto n = exact_sqrt(q.get_num());
    auto d = exact_sqrt(q.get_den());
    if (!n || !d) return std::nullopt;
    return make_rational(*n, *d);
}

/// a + b*sqrt(d) with d squarefree, d != 0, 1.
class QuadExt {
public:
    QuadExt(Rational a, Rational b, Integer d) : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {
        if (d_ == 0 || d_ == 1 || squarefree_part(d_) != d_)
            throw Error("quadratic field parameter must be squarefree and not 0 or 1, got " + d_.get_str());
    }
    static QuadExt rational(const Rational& a, const Integer& d) { return QuadExt(a, 0, d); }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    const Integer& d() const { return d_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_rational() const { return b_ == 0; }

    QuadExt conjugate() const { return QuadExt(a_, -b_, d_); }
    Rational norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }
    Rational trace() const { return 2 * a_; }

    QuadExt inverse() const {
        Rational n = norm();
        if (n == 0) throw Error("inverse of zero in quadratic field");
        return QuadExt(a_ / n, -b_ / n, d_);
    }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        check_same(x, y);
        return QuadExt(x.a_ + y.a_, x.b_ + y.b_, x.d_);
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        check_same(x, y);
        return QuadExt(x.a_ - y.a_, x.b_ - y.b_, x.d_);
    }
    friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a_, -x.b_, x.d_); }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        check_same(x, y);
        return QuadExt(x.a_ * y.a_ + Rational(x.d_) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, x.d_);
    }
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.inverse(); }
    friend QuadExt operator*(const Rational& c, const QuadExt& x) { return QuadExt(c * x.a_, c * x.b_, x.d_); }
    friend QuadExt operator+(const QuadExt& x, const Rational& c) { return QuadExt(x.a_ + c, x.b_, x.d_); }

    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
    }

    std::string to_string() const {
        return "(" + isogate::to_string(a_) + ")+(" + isogate::to_string(b_) + ")*sqrt(" + d_.get_str() + ")";
    }

private:
    static void check_same(const QuadExt& x, const QuadExt& y) {
        if (x.d_ != y.d_) throw Error("mixed quadratic fields");
    }

    Rational a_, b_;
    Integer d_;
};

inline std::ostream& operator<<(std::ostream& os, const QuadExt& x) { return os << x.to_string(); }

}  // namespace isogate
