#pragma once

// Polynomials over F_p and their factorization (square-free split,
// distinct-degree and equal-degree factorization).

#include "isogate/arith.hpp"
#include "isogate/poly.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

namespace isogate {

class UnsupportedModulus : public Error {
public:
    using Error::Error;
};

class PolyFp {
public:
    using u64 = std::uint64_t;

    explicit PolyFp(u64 p) : p_(p) {}
    PolyFp(u64 p, std::vector<u64> coeffs) : p_(p), c_(std::move(coeffs)) {
        for (auto& x : c_) x %= p_;
        trim();
    }
    static PolyFp from_integers(u64 p, const ZCoeffs& z) {
        std::vector<u64> v;
        v.reserve(z.size());
        for (const auto& x : z) v.push_back(mod_u64(x, p));
        return PolyFp(p, std::move(v));
    }
    static PolyFp monomial(u64 p, u64 c, std::size_t deg) {
        std::vector<u64> v(deg + 1, 0);
        v[deg] = c % p;
        return PolyFp(p, std::move(v));
    }

    u64 modulus() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<u64>& coeffs() const { return c_; }
    u64 coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    u64 leading() const { return c_.empty() ? 0 : c_.back(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }

    u64 mulmod(u64 a, u64 b) const { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p_); }
    u64 addmod(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    u64 submod(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
    u64 powmod(u64 a, u64 e) const {
        u64 r = 1 % p_;
        a %= p_;
        while (e) {
            if (e & 1) r = mulmod(r, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return r;
    }
    u64 inv(u64 a) const {
        if (a % p_ == 0) throw Error("inverse of zero mod p");
        return powmod(a, p_ - 2);
    }

    u64 eval(u64 x) const {
        u64 acc = 0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = addmod(mulmod(acc, x), c_[i]);
        return acc;
    }

    PolyFp monic() const {
        if (is_zero()) return *this;
        u64 li = inv(leading());
        std::vector<u64> v = c_;
        for (auto& x : v) x = mulmod(x, li);
        return PolyFp(p_, std::move(v));
    }

    PolyFp derivative() const {
        std::vector<u64> d;
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(mulmod(c_[i], i % p_));
        return PolyFp(p_, std::move(d));
    }

    friend PolyFp operator+(const PolyFp& a, const PolyFp& b) {
        std::vector<u64> v(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.addmod(a.coeff(i), b.coeff(i));
        return PolyFp(a.p_, std::move(v));
    }
    friend PolyFp operator-(const PolyFp& a, const PolyFp& b) {
        std::vector<u64> v(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.submod(a.coeff(i), b.coeff(i));
        return PolyFp(a.p_, std::move(v));
    }
    friend PolyFp operator*(const PolyFp& a, const PolyFp& b) {
        if (a.is_zero() || b.is_zero()) return PolyFp(a.p_);
        std::vector<unsigned __int128> acc(a.c_.size() + b.c_.size() - 1, 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (!a.c_[i]) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                acc[i + j] += static_cast<unsigned __int128>(a.c_[i]) * b.c_[j];
                if (acc[i + j] >> 120) acc[i + j] %= a.p_;
            }
        }
        std::vector<u64> v(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) v[i] = static_cast<u64>(acc[i] % a.p_);
        return PolyFp(a.p_, std::move(v));
    }
    friend bool operator==(const PolyFp& a, const PolyFp& b) { return a.p_ == b.p_ && a.c_ == b.c_; }
    friend bool operator<(const PolyFp& a, const PolyFp& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return std::lexicographical_compare(a.c_.rbegin(), a.c_.rend(), b.c_.rbegin(), b.c_.rend());
    }

    std::pair<PolyFp, PolyFp> divrem(const PolyFp& d) const {
        if (d.is_zero()) throw Error("division by zero polynomial mod p");
        if (degree() < d.degree()) return {PolyFp(p_), *this};
        std::vector<u64> r = c_;
        std::vector<u64> q(c_.size() - d.c_.size() + 1, 0);
        u64 li = inv(d.leading());
        for (std::size_t k = q.size(); k-- > 0;) {
            u64 t = mulmod(r[k + d.c_.size() - 1], li);
            q[k] = t;
            if (!t) continue;
            for (std::size_t j = 0; j < d.c_.size(); ++j) r[k + j] = submod(r[k + j], mulmod(t, d.c_[j]));
        }
        r.resize(d.c_.size() - 1);
        return {PolyFp(p_, std::move(q)), PolyFp(p_, std::move(r))};
    }
    PolyFp operator%(const PolyFp& d) const { return divrem(d).second; }
    PolyFp operator/(const PolyFp& d) const { return divrem(d).first; }

    /// this^e mod m.
    PolyFp powmod(u64 e, const PolyFp& m) const {
        PolyFp r(p_, {1});
        PolyFp b = *this % m;
        while (e) {
            if (e & 1) r = (r * b) % m;
            e >>= 1;
            if (e) b = (b * b) % m;
        }
        return r % m;
    }

    std::string to_string() const {
        ZCoeffs z(c_.begin(), c_.end());
        return PolyQ::from_integers(z).to_string() + " (mod " + std::to_string(p_) + ")";
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    u64 p_;
    std::vector<u64> c_;
};

inline PolyFp gcd(PolyFp a, PolyFp b) {
    while (!b.is_zero()) {
        PolyFp r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g monic.
inline std::tuple<PolyFp, PolyFp, PolyFp> xgcd(const PolyFp& a, const PolyFp& b) {
    const auto p = a.modulus();
    PolyFp r0 = a, r1 = b;
    PolyFp s0(p, {1}), s1(p), t0(p), t1(p, {1});
    while (!r1.is_zero()) {
        auto [q, r] = r0.divrem(r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        PolyFp s2 = s0 - q * s1, t2 = t0 - q * t1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    auto li = r0.inv(r0.leading());
    PolyFp c(p, {li});
    return {r0 * c, s0 * c, t0 * c};
}

struct FpFactor {
    PolyFp factor;
    int multiplicity;
};

namespace detail {

/// Square-free decomposition of a monic polynomial in characteristic p.
inline std::vector<std::pair<PolyFp, int>> squarefree_decomposition(const PolyFp& f) {
    const auto p = f.modulus();
    std::vector<std::pair<PolyFp, int>> out;
    if (f.degree() <= 0) return out;
    PolyFp fd = f.derivative();
    if (fd.is_zero()) {
        // f = g(x^p); g(x)^p = f since coefficients are in F_p.
        std::vector<std::uint64_t> g;
        for (std::size_t i = 0; i < f.coeffs().size(); i += p) g.push_back(f.coeffs()[i]);
        for (auto& [h, m] : squarefree_decomposition(PolyFp(p, g))) out.emplace_back(h, m * static_cast<int>(p));
        return out;
    }
    PolyFp c = gcd(f, fd);
    PolyFp w = f / c;
    int i = 1;
    while (!w.is_one()) {
        PolyFp y = gcd(w, c);
        PolyFp z = w / y;
        if (z.degree() > 0) out.emplace_back(z.monic(), i);
        ++i;
        w = y;
        c = c / y;
    }
    if (c.degree() > 0) {
        std::vector<std::uint64_t> g;
        for (std::size_t k = 0; k < c.coeffs().size(); k += p) g.push_back(c.coeffs()[k]);
        for (auto& [h, m] : squarefree_decomposition(PolyFp(p, g).monic())) out.emplace_back(h, m * static_cast<int>(p));
    }
    return out;
}

/// Distinct-degree factorization of a square-free monic polynomial: (product of degree-d factors, d).
inline std::vector<std::pair<PolyFp, int>> distinct_degree(PolyFp f) {
    const auto p = f.modulus();
    std::vector<std::pair<PolyFp, int>> out;
    PolyFp x(p, {0, 1});
    PolyFp h = x;
    int d = 0;
    while (f.degree() >= 2 * (d + 1)) {
        ++d;
        h = h.powmod(p, f);
        PolyFp g = gcd(f, h - x);
        if (g.degree() > 0) {
            out.emplace_back(g, d);
            f = f / g;
            h = h % f;
        }
    }
    if (f.degree() > 0) out.emplace_back(f.monic(), f.degree());
    return out;
}

/// Cantor-Zassenhaus splitting of a product of distinct degree-d monic irreducibles.
inline void equal_degree(const PolyFp& f, int d, std::mt19937_64& rng, std::vector<PolyFp>& out) {
    const auto p = f.modulus();
    if (f.degree() == d) {
        out.push_back(f.monic());
        return;
    }
    std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
    unsigned __int128 qd = 1;
    for (int i = 0; i < d; ++i) qd *= p;
    while (true) {
        std::vector<std::uint64_t> a(static_cast<std::size_t>(f.degree()));
        for (auto& v : a) v = dist(rng);
        PolyFp r(p, a);
        if (r.degree() <= 0) continue;
        // r^((p^d - 1)/2) - 1, computed by repeated squaring with a 128-bit exponent.
        unsigned __int128 e = (qd - 1) / 2;
        PolyFp acc(p, {1});
        PolyFp b = r % f;
        while (e) {
            if (e & 1) acc = (acc * b) % f;
            e >>= 1;
            if (e) b = (b * b) % f;
        }
        PolyFp g = gcd(f, acc - PolyFp(p, {1}));
        if (g.degree() > 0 && g.degree() < f.degree()) {
            equal_degree(g, d, rng, out);
            equal_degree(f / g, d, rng, out);
            return;
        }
    }
}

}  // namespace detail

/// Complete factorization of a nonzero polynomial over F_p, p an odd prime.
/// Factors are monic, sorted by (degree, coefficients); the leading unit is dropped.
inline std::vector<FpFactor> factor_mod_p(const PolyFp& f) {
    const auto p = f.modulus();
    if (p == 2) throw UnsupportedModulus("factor_mod_p: modulus 2 is not supported");
    if (!is_prime_u64(p)) throw UnsupportedModulus("factor_mod_p: modulus " + std::to_string(p) + " is not prime");
    if (f.is_zero()) throw Error("factor_mod_p: zero polynomial");
    std::vector<FpFactor> out;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ p);
    for (auto& [sf, mult] : detail::squarefree_decomposition(f.monic())) {
        for (auto& [g, d] : detail::distinct_degree(sf)) {
            std::vector<PolyFp> pieces;
            detail::equal_degree(g, d, rng, pieces);
            for (auto& piece : pieces) out.push_back({piece, mult});
        }
    }
    std::sort(out.begin(), out.end(), [](const FpFactor& a, const FpFactor& b) {
        if (a.factor == b.factor) return a.multiplicity < b.multiplicity;
        return a.factor < b.factor;
    });
    return out;
}

/// True when f mod p keeps its degree and is square-free.
inline bool is_good_reduction(const ZCoeffs& f, std::uint64_t p) {
    if (f.empty()) return false;
    if (mod_u64(f.back(), p) == 0) return false;
    PolyFp fp = PolyFp::from_integers(p, f);
    if (fp.degree() <= 0) return true;
    return gcd(fp, fp.derivative()).degree() == 0;
}

}  // namespace isogate
