#pragma once

// Dense univariate polynomials over Q (PolyQ) and plain integer coefficient
// vectors used by the factorization routines.

#include "isogate/arith.hpp"

#include <algorithm>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace isogate {

using ZCoeffs = std::vector<Integer>;  // lowest degree first

class PolyQ {
public:
    PolyQ() = default;
    explicit PolyQ(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    PolyQ(std::initializer_list<long> ints) {
        for (long v : ints) c_.emplace_back(v);
        trim();
    }
    static PolyQ constant(const Rational& c) { return PolyQ(std::vector<Rational>{c}); }
    static PolyQ x() { return PolyQ({0, 1}); }
    static PolyQ monomial(const Rational& c, std::size_t deg) {
        std::vector<Rational> v(deg + 1);
        v[deg] = c;
        return PolyQ(std::move(v));
    }
    static PolyQ from_integers(const ZCoeffs& z) {
        std::vector<Rational> v(z.begin(), z.end());
        return PolyQ(std::move(v));
    }

    bool is_zero() const { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& leading() const {
        if (c_.empty()) throw Error("leading coefficient of zero polynomial");
        return c_.back();
    }

    template <typename T>
    T eval(const T& x) const {
        if (c_.empty()) return x - x;
        T acc = x - x + c_.back();
        for (std::size_t i = c_.size() - 1; i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }
    Rational operator()(const Rational& x) const {
        Rational acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }
    QuadExt operator()(const QuadExt& x) const {
        QuadExt acc = QuadExt::rational(0, x.d());
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }

    PolyQ derivative() const {
        std::vector<Rational> d;
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
        return PolyQ(std::move(d));
    }

    PolyQ monic() const {
        if (is_zero()) return *this;
        Rational l = leading();
        std::vector<Rational> v = c_;
        for (auto& x : v) x /= l;
        return PolyQ(std::move(v));
    }

    friend PolyQ operator+(const PolyQ& a, const PolyQ& b) {
        std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(i) + b.coeff(i);
        return PolyQ(std::move(v));
    }
    friend PolyQ operator-(const PolyQ& a) {
        std::vector<Rational> v = a.c_;
        for (auto& x : v) x = -x;
        return PolyQ(std::move(v));
    }
    friend PolyQ operator-(const PolyQ& a, const PolyQ& b) { return a + (-b); }
    friend PolyQ operator*(const PolyQ& a, const PolyQ& b) {
        if (a.is_zero() || b.is_zero()) return PolyQ();
        std::vector<Rational> v(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        }
        return PolyQ(std::move(v));
    }
    friend PolyQ operator*(const Rational& s, const PolyQ& a) {
        std::vector<Rational> v = a.c_;
        for (auto& x : v) x *= s;
        return PolyQ(std::move(v));
    }
    friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c_ == b.c_; }

    PolyQ pow(unsigned e) const {
        PolyQ r = constant(1), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            e >>= 1;
            if (e) b = b * b;
        }
        return r;
    }

    /// Substitutes g for the variable.
    PolyQ compose(const PolyQ& g) const {
        PolyQ acc;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * g + constant(c_[i]);
        return acc;
    }

    std::pair<PolyQ, PolyQ> divrem(const PolyQ& d) const {
        if (d.is_zero()) throw Error("polynomial division by zero");
        std::vector<Rational> r = c_;
        if (degree() < d.degree()) return {PolyQ(), *this};
        std::vector<Rational> q(c_.size() - d.c_.size() + 1);
        const Rational& ld = d.leading();
        for (std::size_t k = q.size(); k-- > 0;) {
            Rational t = r[k + d.c_.size() - 1] / ld;
            q[k] = t;
            if (t == 0) continue;
            for (std::size_t j = 0; j < d.c_.size(); ++j) r[k + j] -= t * d.c_[j];
        }
        r.resize(d.c_.size() - 1);
        return {PolyQ(std::move(q)), PolyQ(std::move(r))};
    }

    /// Common denominator times the polynomial, divided by integer content, with positive leading coefficient.
    ZCoeffs primitive_integer() const {
        if (is_zero()) return {};
        Integer den = 1;
        for (const auto& x : c_) den = ilcm(den, x.get_den());
        ZCoeffs z;
        Integer g = 0;
        for (const auto& x : c_) {
            Integer v = x.get_num() * (den / x.get_den());
            g = igcd(g, v);
            z.push_back(v);
        }
        if (c_.back() < 0) g = -g;
        for (auto& v : z) v /= g;
        return z;
    }

    /// The rational content c with this = c * primitive_integer().
    Rational content() const {
        if (is_zero()) return 0;
        ZCoeffs z = primitive_integer();
        return c_.back() / Rational(z.back());
    }

    std::string to_string(const std::string& var = "x") const;

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

inline PolyQ poly_gcd(PolyQ a, PolyQ b) {
    // Primitive remainder sequence: rescaling each remainder keeps coefficients from blowing up.
    if (!a.is_zero()) a = PolyQ::from_integers(a.primitive_integer());
    if (!b.is_zero()) b = PolyQ::from_integers(b.primitive_integer());
    while (!b.is_zero()) {
        PolyQ r = a.divrem(b).second;
        if (!r.is_zero()) r = PolyQ::from_integers(r.primitive_integer());
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline std::string PolyQ::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        const Rational& c = c_[i];
        if (c == 0) continue;
        Rational mag = abs(c);
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool unit = (mag == 1);
        if (!unit || i == 0) os << isogate::to_string(mag);
        if (i > 0) {
            if (!unit) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const PolyQ& p) { return os << p.to_string(); }

namespace zpoly {

inline void trim(ZCoeffs& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int degree(const ZCoeffs& a) { return static_cast<int>(a.size()) - 1; }

inline ZCoeffs mul(const ZCoeffs& a, const ZCoeffs& b) {
    if (a.empty() || b.empty()) return {};
    ZCoeffs r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

inline Integer content(const ZCoeffs& a) {
    Integer g = 0;
    for (const auto& x : a) g = igcd(g, x);
    return g;
}

inline ZCoeffs primitive(ZCoeffs a) {
    Integer g = content(a);
    if (g == 0) return a;
    if (a.back() < 0) g = -g;
    for (auto& x : a) x /= g;
    return a;
}

/// Exact division in Z[x]; returns nullopt when b does not divide a.
inline std::optional<ZCoeffs> divide_exact(const ZCoeffs& a, const ZCoeffs& b) {
    if (b.empty()) throw Error("division by zero polynomial");
    if (a.empty()) return ZCoeffs{};
    if (a.size() < b.size()) return std::nullopt;
    ZCoeffs r = a;
    ZCoeffs q(a.size() - b.size() + 1);
    const Integer& lb = b.back();
    for (std::size_t k = q.size(); k-- > 0;) {
        Integer& top = r[k + b.size() - 1];
        if (!mpz_divisible_p(top.get_mpz_t(), lb.get_mpz_t())) return std::nullopt;
        Integer t = top / lb;
        q[k] = t;
        if (t == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[k + j] -= t * b[j];
    }
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        if (r[i] != 0) return std::nullopt;
    trim(q);
    return q;
}

inline Integer eval(const ZCoeffs& a, const Integer& x) {
    Integer acc = 0;
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * x + a[i];
    return acc;
}

inline ZCoeffs derivative(const ZCoeffs& a) {
    ZCoeffs d;
    for (std::size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<unsigned long>(i));
    trim(d);
    return d;
}

}  // namespace zpoly

}  // namespace isogate
