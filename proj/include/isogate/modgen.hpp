#pragma once

// Computing classical modular polynomials: Phi_l for small primes l from q-expansions of j,
// and Phi_{l^2} from Res_Z(Phi_l(X, Z), Phi_l(Z, Y)) = (X - Y)^{l+1} Phi_{l^2}(X, Y) by interpolation.

#include "isogate/modpoly.hpp"

#include <functional>
#include <vector>

namespace isogate {

namespace modgen {

using Series = std::vector<Integer>;

inline Series mul(const Series& a, const Series& b, std::size_t n) {
    Series r(n);
    for (std::size_t i = 0; i < a.size() && i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t k = 0; k < b.size() && i + k < n; ++k) r[i + k] += a[i] * b[k];
    }
    return r;
}

/// Coefficients c_k, k < n, of q * j(q) = 1 + 744 q + 196884 q^2 + ...
inline Series j_series(std::size_t n) {
    Series e4(n);
    e4[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        Integer s = 0;
        for (std::size_t d = 1; d <= k; ++d)
            if (k % d == 0) s += Integer(d) * d * d;
        e4[k] = 240 * s;
    }
    // prod (1 - q^k)^24 = Delta / q
    Series delta(n);
    delta[0] = 1;
    for (std::size_t k = 1; k < n; ++k)
        for (int r = 0; r < 24; ++r)
            for (std::size_t i = n; i-- > k;) delta[i] -= delta[i - k];
    Series inv(n);
    inv[0] = 1;
    for (std::size_t k = 1; k < n; ++k) {
        Integer s = 0;
        for (std::size_t i = 1; i <= k; ++i) s += delta[i] * inv[k - i];
        inv[k] = -s;
    }
    return mul(mul(mul(e4, e4, n), e4, n), inv, n);
}

/// Solves A x = b exactly (A has full column rank, system consistent); throws otherwise.
inline std::vector<Rational> solve_exact(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
    std::vector<std::size_t> pivot_row(cols);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) throw Error("modular polynomial system is rank deficient");
        std::swap(a[piv], a[r]);
        std::swap(b[piv], b[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[r][c];
            for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
            b[i] -= f * b[r];
        }
        pivot_row[c] = r++;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) throw Error("modular polynomial system is inconsistent");
    std::vector<Rational> x(cols);
    for (std::size_t c = 0; c < cols; ++c) x[c] = b[pivot_row[c]] / a[pivot_row[c]][c];
    return x;
}

/// Phi_l for a prime l, by matching q-expansions of Phi_l(j(q), j(q^l)).
inline ModularPolynomial classical_prime(int l) {
    if (l < 2 || !is_prime_u64(static_cast<std::uint64_t>(l)) || l > 13)
        throw Error("classical_prime: level must be a prime <= 13");
    const std::size_t D = static_cast<std::size_t>(l) * static_cast<std::size_t>(l + 1);  // largest pole order
    const std::size_t extra = 20;
    const std::size_t M = D + extra;  // coefficients of q^{-D} .. q^{extra - 1}
    Series js = j_series(M);
    Series jl(M);
    for (std::size_t k = 0; k * static_cast<std::size_t>(l) < M; ++k) jl[k * static_cast<std::size_t>(l)] = js[k];
    std::vector<Series> pa(static_cast<std::size_t>(l) + 2), pb(static_cast<std::size_t>(l) + 2);
    pa[0] = pb[0] = Series{1};
    for (std::size_t k = 1; k < pa.size(); ++k) {
        pa[k] = mul(pa[k - 1], js, M);
        pb[k] = mul(pb[k - 1], jl, M);
    }
    // q^D j(q)^a j(q^l)^b as a power series, truncated to M terms.
    auto monomial = [&](int a, int b) {
        Series s = mul(pa[static_cast<std::size_t>(a)], pb[static_cast<std::size_t>(b)], M);
        std::size_t shift = D - static_cast<std::size_t>(a) - static_cast<std::size_t>(l) * static_cast<std::size_t>(b);
        Series r(M);
        for (std::size_t i = 0; i + shift < M; ++i) r[i + shift] = s[i];
        return r;
    };
    std::vector<std::pair<int, int>> unknowns;
    for (int a = 0; a <= l; ++a)
        for (int b = 0; b <= a; ++b)
            if (!(a == l && b == l)) unknowns.emplace_back(a, b);
    Series known(M);
    for (auto [a, b, s] : {std::tuple{l + 1, 0, 1}, std::tuple{0, l + 1, 1}, std::tuple{l, l, -1}}) {
        Series m = monomial(a, b);
        for (std::size_t i = 0; i < M; ++i) known[i] += s * m[i];
    }
    std::vector<std::vector<Rational>> A(M, std::vector<Rational>(unknowns.size()));
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        auto [a, b] = unknowns[u];
        Series m = monomial(a, b);
        if (a != b) {
            Series t = monomial(b, a);
            for (std::size_t i = 0; i < M; ++i) m[i] += t[i];
        }
        for (std::size_t i = 0; i < M; ++i) A[i][u] = m[i];
    }
    std::vector<Rational> rhs(M);
    for (std::size_t i = 0; i < M; ++i) rhs[i] = -known[i];
    auto x = solve_exact(std::move(A), std::move(rhs));
    ModularPolynomial::Table table;
    table[{l + 1, 0}] = 1;
    table[{l, l}] = -1;
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
        if (x[u].get_den() != 1) throw Error("non-integral modular polynomial coefficient");
        if (x[u] != 0) table[unknowns[u]] = x[u].get_num();
    }
    return ModularPolynomial(l, std::move(table));
}

/// Determinant of a square integer matrix by fraction-free elimination.
inline Integer bareiss_det(std::vector<std::vector<Integer>> m) {
    const std::size_t n = m.size();
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && m[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(m[s], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        prev = m[k][k];
    }
    return n == 0 ? Integer(1) : Integer(sign * m[n - 1][n - 1]);
}

/// Sylvester resultant of two integer polynomials (lowest degree first).
inline Integer resultant(const ZCoeffs& f, const ZCoeffs& g) {
    const std::size_t n = f.size() - 1, m = g.size() - 1, N = n + m;
    std::vector<std::vector<Integer>> s(N, std::vector<Integer>(N));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t i = 0; i <= n; ++i) s[r][r + i] = f[n - i];
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t i = 0; i <= m; ++i) s[m + r][r + i] = g[m - i];
    return bareiss_det(std::move(s));
}

/// Newton interpolation through (nodes[i], values[i]).
inline PolyQ interpolate(const std::vector<Rational>& nodes, std::vector<Rational> values) {
    const std::size_t n = nodes.size();
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = n; i-- > k;) values[i] = (values[i] - values[i - 1]) / (nodes[i] - nodes[i - k]);
    PolyQ acc = PolyQ::constant(values[n - 1]);
    for (std::size_t i = n - 1; i-- > 0;) acc = acc * PolyQ(std::vector<Rational>{-nodes[i], 1}) + PolyQ::constant(values[i]);
    return acc;
}

/// Phi_{l^2} from Phi_l.
inline ModularPolynomial classical_prime_square(const ModularPolynomial& phi_l,
                                                const std::function<void(int, int)>& progress = {}) {
    const int l = phi_l.level();
    const int D = static_cast<int>(modarith::psi(static_cast<std::uint64_t>(l * l)));
    // Phi_l(v, Z) as a polynomial in Z.
    auto row = [&](long v) {
        ZCoeffs z(static_cast<std::size_t>(l) + 2);
        for (const auto& [ij, c] : phi_l.table()) {
            auto [a, b] = ij;
            z[static_cast<std::size_t>(b)] += c * ipow(Integer(v), static_cast<unsigned long>(a));
            if (a != b) z[static_cast<std::size_t>(a)] += c * ipow(Integer(v), static_cast<unsigned long>(b));
        }
        return z;
    };
    std::vector<long> xs, ys;
    for (int i = 0; i <= D; ++i) {
        xs.push_back(i);
        ys.push_back(-1 - i);
    }
    std::vector<ZCoeffs> rx, ry;
    for (long x : xs) rx.push_back(row(x));
    for (long y : ys) ry.push_back(row(y));
    const int sgn = ((l + 1) * (l + 1)) % 2 == 0 ? 1 : -1;
    std::vector<Rational> xnodes(xs.begin(), xs.end()), ynodes(ys.begin(), ys.end());
    // columns[a][k] = coefficient of X^a in Phi_{l^2}(X, ys[k])
    std::vector<std::vector<Rational>> columns(static_cast<std::size_t>(D) + 1, std::vector<Rational>(ys.size()));
    for (std::size_t k = 0; k < ys.size(); ++k) {
        std::vector<Rational> vals;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            Integer r = sgn * resultant(rx[i], ry[k]);
            Integer d = ipow(Integer(xs[i] - ys[k]), static_cast<unsigned long>(l + 1));
            if (r % d != 0) throw Error("resultant not divisible by (x - y)^(l+1)");
            vals.push_back(Rational(Integer(r / d)));
        }
        PolyQ px = interpolate(xnodes, vals);
        for (int a = 0; a <= D; ++a) columns[static_cast<std::size_t>(a)][k] = px.coeff(static_cast<std::size_t>(a));
        if (progress) progress(static_cast<int>(k) + 1, static_cast<int>(ys.size()));
    }
    std::vector<PolyQ> by_power;
    for (int a = 0; a <= D; ++a) by_power.push_back(interpolate(ynodes, columns[static_cast<std::size_t>(a)]));
    ModularPolynomial::Table table;
    for (int a = 0; a <= D; ++a)
        for (int b = 0; b <= D; ++b) {
            Rational c = by_power[static_cast<std::size_t>(a)].coeff(static_cast<std::size_t>(b));
            Rational c_sym = by_power[static_cast<std::size_t>(b)].coeff(static_cast<std::size_t>(a));
            if (c != c_sym) throw Error("interpolated polynomial is not symmetric");
            if (c.get_den() != 1) throw Error("non-integral interpolated coefficient");
            if (a >= b && c != 0) table[{a, b}] = c.get_num();
        }
    return ModularPolynomial(l * l, std::move(table));
}

/// Phi_N for N a prime <= 13 or the square of a prime <= 7.
inline ModularPolynomial classical(int n, const std::function<void(int, int)>& progress = {}) {
    if (n >= 2 && is_prime_u64(static_cast<std::uint64_t>(n))) return classical_prime(n);
    for (int l : {2, 3, 5, 7})
        if (n == l * l) return classical_prime_square(classical_prime(l), progress);
    throw Error("cannot generate Phi_" + std::to_string(n) + ": supported levels are primes <= 13 and 4, 9, 25, 49");
}

}  // namespace modgen

}  // namespace isogate
