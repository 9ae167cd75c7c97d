#pragma once

// Factorization over Q: square-free decomposition, mod-p factorization at a
// good prime, Hensel lifting past twice the Landau-Mignotte bound, and
// subset recombination. Also degree-pattern certification across primes.

#include "isogate/arith.hpp"
#include "isogate/poly.hpp"
#include "isogate/polyfp.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace isogate {

/// How irreducibility of a reported factor was established.
struct IrreducibilityCertificate {
    enum class Kind { Linear, ModPIrreducible, DegreePattern, Recombination };
    Kind kind = Kind::Linear;
    std::vector<std::uint64_t> primes;  // primes whose data backs the claim
    int modular_factor_count = 0;       // for Recombination: factors mod the working prime

    std::string describe() const {
        std::string ps;
        for (auto p : primes) ps += (ps.empty() ? "" : ",") + std::to_string(p);
        switch (kind) {
            case Kind::Linear: return "linear";
            case Kind::ModPIrreducible: return "irreducible mod " + ps;
            case Kind::DegreePattern: return "degree patterns mod " + ps;
            case Kind::Recombination:
                return "exhaustive recombination of " + std::to_string(modular_factor_count) + " factors mod " + ps;
        }
        return "?";
    }
};

struct QFactor {
    PolyQ factor;  // primitive integer polynomial, positive leading coefficient
    int multiplicity = 1;
    IrreducibilityCertificate certificate;
};

struct FactorizationQ {
    Rational content;
    std::vector<QFactor> factors;

    PolyQ expand() const {
        PolyQ acc = PolyQ::constant(content);
        for (const auto& f : factors) acc = acc * f.factor.pow(static_cast<unsigned>(f.multiplicity));
        return acc;
    }
    std::vector<int> degrees() const {
        std::vector<int> d;
        for (const auto& f : factors)
            for (int i = 0; i < f.multiplicity; ++i) d.push_back(f.factor.degree());
        std::sort(d.begin(), d.end());
        return d;
    }
};

namespace detail {

// Arithmetic in (Z/mZ)[x] with arbitrary-precision residues.
struct ModRing {
    Integer m;

    ZCoeffs reduce(ZCoeffs a) const {
        for (auto& x : a) x = imod(x, m);
        zpoly::trim(a);
        return a;
    }
    ZCoeffs add(const ZCoeffs& a, const ZCoeffs& b) const {
        ZCoeffs r(std::max(a.size(), b.size()));
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = (i < a.size() ? a[i] : Integer(0)) + (i < b.size() ? b[i] : Integer(0));
        return reduce(std::move(r));
    }
    ZCoeffs sub(const ZCoeffs& a, const ZCoeffs& b) const {
        ZCoeffs r(std::max(a.size(), b.size()));
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = (i < a.size() ? a[i] : Integer(0)) - (i < b.size() ? b[i] : Integer(0));
        return reduce(std::move(r));
    }
    ZCoeffs mul(const ZCoeffs& a, const ZCoeffs& b) const { return reduce(zpoly::mul(a, b)); }
    /// Division by a monic polynomial.
    std::pair<ZCoeffs, ZCoeffs> divrem(const ZCoeffs& a, const ZCoeffs& b) const {
        if (b.empty() || b.back() != 1) throw Error("ModRing::divrem needs a monic divisor");
        if (a.size() < b.size()) return {{}, a};
        ZCoeffs r = a;
        ZCoeffs q(a.size() - b.size() + 1);
        for (std::size_t k = q.size(); k-- > 0;) {
            Integer t = imod(r[k + b.size() - 1], m);
            q[k] = t;
            if (t == 0) continue;
            for (std::size_t j = 0; j < b.size(); ++j) r[k + j] = imod(r[k + j] - t * b[j], m);
        }
        r.resize(b.size() - 1);
        return {reduce(std::move(q)), reduce(std::move(r))};
    }
};

inline ZCoeffs to_z(const PolyFp& f) { return ZCoeffs(f.coeffs().begin(), f.coeffs().end()); }

/// One quadratic Hensel step (f = g*h mod m, s*g + t*h = 1 mod m, h monic) to modulus m^2.
inline void hensel_step(const ZCoeffs& f, ZCoeffs& g, ZCoeffs& h, ZCoeffs& s, ZCoeffs& t, const Integer& m) {
    ModRing R{m * m};
    ZCoeffs e = R.sub(R.reduce(f), R.mul(g, h));
    auto [q, r] = R.divrem(R.mul(s, e), h);
    ZCoeffs g2 = R.add(R.add(g, R.mul(t, e)), R.mul(q, g));
    ZCoeffs h2 = R.add(h, r);
    ZCoeffs b = R.sub(R.add(R.mul(s, g2), R.mul(t, h2)), ZCoeffs{1});
    auto [c, d] = R.divrem(R.mul(s, b), h2);
    s = R.sub(s, d);
    t = R.sub(R.sub(t, R.mul(t, b)), R.mul(c, g2));
    g = std::move(g2);
    h = std::move(h2);
}

/// Lifts f = lc(f) * prod(factors) from mod p to mod p^(2^k) >= bound.
/// The input factors are monic mod p and pairwise coprime.
inline std::vector<ZCoeffs> multifactor_hensel(const ZCoeffs& f, const std::vector<PolyFp>& factors,
                                               std::uint64_t p, const Integer& target, Integer& modulus_out) {
    if (factors.size() == 1) {
        Integer m = p;
        while (m < target) m *= m;
        modulus_out = m;
        Integer inv;
        Integer lc = imod(f.back(), m);
        mpz_invert(inv.get_mpz_t(), lc.get_mpz_t(), m.get_mpz_t());
        ZCoeffs u = f;
        for (auto& x : u) x = imod(x * inv, m);
        return {u};
    }
    std::size_t half = factors.size() / 2;
    std::vector<PolyFp> left(factors.begin(), factors.begin() + static_cast<long>(half));
    std::vector<PolyFp> right(factors.begin() + static_cast<long>(half), factors.end());
    PolyFp gp(p, {mod_u64(f.back(), p)});
    for (const auto& u : left) gp = gp * u;
    PolyFp hp(p, {1});
    for (const auto& u : right) hp = hp * u;
    auto [gg, s0, t0] = xgcd(gp, hp);
    if (gg.degree() != 0) throw Error("Hensel lifting: modular factors not coprime");
    // Normalize so deg s < deg h.
    PolyFp s1 = s0 % hp;
    PolyFp t1 = (PolyFp(p, {1}) - s1 * gp) / hp;
    ZCoeffs g = to_z(gp), h = to_z(hp), s = to_z(s1), t = to_z(t1);
    Integer m = p;
    while (m < target) {
        hensel_step(f, g, h, s, t, m);
        m *= m;
    }
    Integer m_left, m_right;
    auto lf = multifactor_hensel(g, left, p, target, m_left);
    auto rf = multifactor_hensel(h, right, p, target, m_right);
    // Both recursive calls reach the same modulus as m, since each doubles exponents from p the same way.
    modulus_out = m;
    for (auto& x : lf) x = ModRing{m}.reduce(x);
    for (auto& x : rf) x = ModRing{m}.reduce(x);
    lf.insert(lf.end(), rf.begin(), rf.end());
    return lf;
}

inline Integer sqrt_ceil(const Integer& n) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    if (r * r < n) r += 1;
    return r;
}

/// Landau-Mignotte: every factor of f in Z[x], scaled to leading coefficient lc(f), has
/// coefficients bounded by this value.
inline Integer landau_mignotte_bound(const ZCoeffs& f) {
    Integer norm2 = 0;
    for (const auto& c : f) norm2 += c * c;
    Integer b = sqrt_ceil(norm2) * abs(f.back());
    mpz_mul_2exp(b.get_mpz_t(), b.get_mpz_t(), static_cast<mp_bitcnt_t>(zpoly::degree(f)));
    return b;
}

inline std::uint64_t choose_working_prime(const ZCoeffs& f) {
    for (std::uint64_t p = 5;; p = next_prime(p))
        if (is_good_reduction(f, p)) return p;
}

/// Degrees of the irreducible factors of f mod p; f must have good reduction at p.
inline std::vector<int> degree_pattern(const ZCoeffs& f, std::uint64_t p) {
    std::vector<int> d;
    for (const auto& [g, k] : detail::distinct_degree(PolyFp::from_integers(p, f).monic()))
        for (int i = 0; i < g.degree() / k; ++i) d.push_back(k);
    std::sort(d.begin(), d.end());
    return d;
}

/// Among the first few good primes, the one with the fewest modular factors (smallest prime on ties),
/// which keeps the recombination search small.
inline std::uint64_t choose_factoring_prime(const ZCoeffs& f, int candidates = 8) {
    std::uint64_t best = 0;
    std::size_t best_count = 0;
    int seen = 0;
    for (std::uint64_t p = 5; seen < candidates; p = next_prime(p)) {
        if (!is_good_reduction(f, p)) continue;
        ++seen;
        std::size_t count = degree_pattern(f, p).size();
        if (best == 0 || count < best_count) {
            best = p;
            best_count = count;
        }
        if (best_count == 1) break;
    }
    return best;
}

inline std::vector<bool> subset_sums(const std::vector<int>& pattern, int n) {
    std::vector<bool> reach(static_cast<std::size_t>(n) + 1, false);
    reach[0] = true;
    for (int d : pattern)
        for (int s = n; s >= d; --s)
            if (reach[static_cast<std::size_t>(s - d)]) reach[static_cast<std::size_t>(s)] = true;
    return reach;
}

/// Tries to certify irreducibility of a square-free primitive f from mod-p degree patterns alone.
inline std::optional<IrreducibilityCertificate> pattern_certificate(const ZCoeffs& f, int max_primes = 12) {
    int n = zpoly::degree(f);
    std::vector<bool> possible(static_cast<std::size_t>(n) + 1, true);
    std::vector<std::uint64_t> used;
    std::uint64_t p = 3;
    for (int tries = 0; tries < max_primes * 4 && static_cast<int>(used.size()) < max_primes; ++tries) {
        p = next_prime(p);
        if (!is_good_reduction(f, p)) continue;
        auto pat = degree_pattern(f, p);
        used.push_back(p);
        if (pat.size() == 1) {
            IrreducibilityCertificate c;
            c.kind = IrreducibilityCertificate::Kind::ModPIrreducible;
            c.primes = {p};
            return c;
        }
        auto reach = subset_sums(pat, n);
        bool any = false;
        for (int s = 1; s < n; ++s) {
            possible[static_cast<std::size_t>(s)] = possible[static_cast<std::size_t>(s)] && reach[static_cast<std::size_t>(s)];
            any = any || possible[static_cast<std::size_t>(s)];
        }
        if (!any) {
            IrreducibilityCertificate c;
            c.kind = IrreducibilityCertificate::Kind::DegreePattern;
            c.primes = used;
            return c;
        }
    }
    return std::nullopt;
}

/// Zassenhaus factorization of a square-free primitive integer polynomial of degree >= 1.
inline std::vector<std::pair<ZCoeffs, IrreducibilityCertificate>> factor_squarefree_primitive(ZCoeffs f) {
    std::vector<std::pair<ZCoeffs, IrreducibilityCertificate>> out;
    auto finish = [&](const ZCoeffs& g, const IrreducibilityCertificate& fallback) {
        IrreducibilityCertificate cert = fallback;
        if (zpoly::degree(g) == 1) {
            cert = IrreducibilityCertificate{};
        } else if (auto pc = pattern_certificate(g)) {
            cert = *pc;
        }
        out.emplace_back(g, cert);
    };
    if (zpoly::degree(f) == 1) {
        finish(f, {});
        return out;
    }
    std::uint64_t p = choose_factoring_prime(f);
    auto modfactors = factor_mod_p(PolyFp::from_integers(p, f));
    IrreducibilityCertificate recomb;
    recomb.kind = IrreducibilityCertificate::Kind::Recombination;
    recomb.primes = {p};
    recomb.modular_factor_count = static_cast<int>(modfactors.size());
    if (modfactors.size() == 1) {
        IrreducibilityCertificate c;
        c.kind = IrreducibilityCertificate::Kind::ModPIrreducible;
        c.primes = {p};
        out.emplace_back(f, c);
        return out;
    }
    std::vector<PolyFp> us;
    for (auto& mf : modfactors) us.push_back(mf.factor);
    Integer bound = 2 * landau_mignotte_bound(f) + 1;
    Integer M;
    std::vector<ZCoeffs> lifted = multifactor_hensel(f, us, p, bound, M);

    std::vector<std::size_t> alive(lifted.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    std::size_t s = 1;
    while (2 * s <= alive.size()) {
        bool found = false;
        std::vector<std::size_t> idx(s);
        for (std::size_t i = 0; i < s; ++i) idx[i] = i;
        while (true) {
            Integer lc = f.back();
            // Constant-term screen before forming the full product.
            Integer c0 = lc;
            for (auto i : idx) c0 = imod(c0 * (lifted[alive[i]].empty() ? Integer(0) : lifted[alive[i]][0]), M);
            c0 = symmetric_mod(c0, M);
            bool plausible = (f[0] == 0) || (c0 != 0 && mpz_divisible_p(Integer(lc * f[0]).get_mpz_t(), c0.get_mpz_t()));
            if (plausible) {
                ZCoeffs g{lc};
                ModRing R{M};
                for (auto i : idx) g = R.mul(g, lifted[alive[i]]);
                for (auto& x : g) x = symmetric_mod(x, M);
                zpoly::trim(g);
                g = zpoly::primitive(g);
                if (auto q = zpoly::divide_exact(f, g)) {
                    finish(g, recomb);
                    f = *q;
                    std::vector<std::size_t> rest;
                    for (std::size_t k = 0; k < alive.size(); ++k)
                        if (std::find(idx.begin(), idx.end(), k) == idx.end()) rest.push_back(alive[k]);
                    alive = rest;
                    found = true;
                    break;
                }
            }
            // Next combination in lexicographic order.
            std::size_t k = s;
            while (k > 0 && idx[k - 1] == alive.size() - s + k - 1) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < s; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (!found) ++s;
    }
    if (zpoly::degree(f) > 0) finish(zpoly::primitive(f), recomb);
    return out;
}

/// True when f stays square-free and keeps its degree modulo one of the first `tries` odd primes >= 5,
/// which proves f square-free over Q. False is inconclusive.
inline bool squarefree_mod_some_prime(const ZCoeffs& f, int tries = 60) {
    std::uint64_t p = 5;
    for (int k = 0; k < tries; ++k, p = next_prime(p))
        if (is_good_reduction(f, p)) return true;
    return false;
}

/// Square-free decomposition over Q of a primitive integer polynomial (Yun).
inline std::vector<std::pair<ZCoeffs, int>> squarefree_over_q(const ZCoeffs& f) {
    std::vector<std::pair<ZCoeffs, int>> out;
    PolyQ F = PolyQ::from_integers(f);
    if (squarefree_mod_some_prime(f)) {
        out.emplace_back(f, 1);
        return out;
    }
    PolyQ c = poly_gcd(F, F.derivative());
    PolyQ w = F.divrem(c).first;
    int i = 1;
    while (w.degree() > 0) {
        PolyQ y = poly_gcd(w, c);
        PolyQ z = w.divrem(y).first;
        if (z.degree() > 0) out.emplace_back(z.primitive_integer(), i);
        ++i;
        w = y;
        c = c.divrem(y).first;
    }
    return out;
}

}  // namespace detail

inline bool factor_less(const PolyQ& a, const PolyQ& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.coeffs() < b.coeffs();
}

/// Complete factorization over Q into irreducible primitive integer polynomials.
inline FactorizationQ factor_over_q(const PolyQ& f) {
    if (f.is_zero()) throw Error("factor_over_q: zero polynomial");
    FactorizationQ out;
    out.content = f.content();
    if (f.degree() == 0) return out;
    ZCoeffs prim = f.primitive_integer();
    for (auto& [part, mult] : detail::squarefree_over_q(prim)) {
        for (auto& [g, cert] : detail::factor_squarefree_primitive(part)) {
            out.factors.push_back({PolyQ::from_integers(g), mult, cert});
        }
    }
    std::sort(out.factors.begin(), out.factors.end(), [](const QFactor& a, const QFactor& b) {
        if (a.factor == b.factor) return a.multiplicity < b.multiplicity;
        return factor_less(a.factor, b.factor);
    });
    return out;
}

struct LowDegreeFactor {
    PolyQ factor;
    std::optional<Rational> root;          // degree 1
    std::optional<Integer> discriminant;   // degree 2
    std::optional<Integer> field;          // degree 2: squarefree d with Q(sqrt d)
};

inline std::vector<LowDegreeFactor> low_degree_factors(const PolyQ& f, int dmax) {
    if (dmax < 1 || dmax > 2) throw Error("low_degree_factors: dmax must be 1 or 2");
    std::vector<LowDegreeFactor> out;
    for (const auto& qf : factor_over_q(f).factors) {
        int d = qf.factor.degree();
        if (d > dmax) continue;
        LowDegreeFactor l{qf.factor, std::nullopt, std::nullopt, std::nullopt};
        const auto& c = qf.factor.coeffs();
        if (d == 1) {
            l.root = -c[0] / c[1];
        } else {
            Integer a = c[2].get_num(), b = c[1].get_num(), cc = c[0].get_num();
            Integer disc = b * b - 4 * a * cc;
            l.discriminant = disc;
            l.field = squarefree_part(disc);
        }
        out.push_back(std::move(l));
    }
    return out;
}

class BadPrimeError : public Error {
public:
    BadPrimeError(std::uint64_t p, const std::string& why)
        : Error("prime " + std::to_string(p) + " is not of good reduction: " + why), prime(p) {}
    std::uint64_t prime;
};

using DegreeMultiset = std::vector<int>;  // sorted ascending

namespace detail {

/// Can the items of `pattern` be split into groups summing to each entry of `targets`?
inline bool packs(std::vector<int> pattern, std::vector<int> targets) {
    std::sort(pattern.rbegin(), pattern.rend());
    std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
        if (i == pattern.size()) {
            for (int t : targets)
                if (t != 0) return false;
            return true;
        }
        for (std::size_t b = 0; b < targets.size(); ++b) {
            if (targets[b] < pattern[i]) continue;
            bool seen = false;
            for (std::size_t c = 0; c < b; ++c)
                if (targets[c] == targets[b]) seen = true;
            if (seen) continue;
            targets[b] -= pattern[i];
            bool ok = place(i + 1);
            targets[b] += pattern[i];
            if (ok) return true;
        }
        return false;
    };
    return place(0);
}

/// Exact number of rational roots of a square-free primitive f, by lifting the linear mod-p factors.
inline int count_rational_roots(const ZCoeffs& f) {
    if (zpoly::degree(f) < 1) return 0;
    if (f[0] == 0) {
        ZCoeffs g(f.begin() + 1, f.end());
        return 1 + count_rational_roots(g);
    }
    std::uint64_t p = choose_working_prime(f);
    std::vector<PolyFp> linear;
    PolyFp rest(p, {1});
    for (const auto& mf : factor_mod_p(PolyFp::from_integers(p, f))) {
        if (mf.factor.degree() == 1)
            linear.push_back(mf.factor);
        else
            rest = rest * mf.factor;
    }
    if (linear.empty()) return 0;
    std::vector<PolyFp> us = linear;
    if (rest.degree() > 0) us.push_back(rest);
    Integer M;
    auto lifted = multifactor_hensel(f, us, p, 2 * landau_mignotte_bound(f) + 1, M);
    int count = 0;
    ModRing R{M};
    for (std::size_t i = 0; i < linear.size(); ++i) {
        ZCoeffs g = R.mul(ZCoeffs{f.back()}, lifted[i]);
        for (auto& x : g) x = symmetric_mod(x, M);
        zpoly::trim(g);
        if (zpoly::divide_exact(f, zpoly::primitive(g))) ++count;
    }
    return count;
}

}  // namespace detail

/// Mod-p degree patterns of f at the given primes.
inline std::map<std::uint64_t, std::vector<int>> degree_patterns(const PolyQ& f, const std::vector<std::uint64_t>& primes) {
    ZCoeffs z = f.primitive_integer();
    std::map<std::uint64_t, std::vector<int>> out;
    for (auto p : primes) {
        if (p < 3 || !is_prime_u64(p)) throw BadPrimeError(p, "not an odd prime");
        if (mod_u64(z.back(), p) == 0) throw BadPrimeError(p, "divides the leading coefficient");
        if (!is_good_reduction(z, p)) throw BadPrimeError(p, "divides the discriminant");
        out[p] = detail::degree_pattern(z, p);
    }
    return out;
}

/// Every multiset of Q-factor degrees compatible with all mod-p degree patterns.
/// Throws when the candidate enumeration exceeds `cap`.
inline std::set<DegreeMultiset> certify_factor_degrees(const PolyQ& f, const std::vector<std::uint64_t>& primes,
                                                      std::size_t cap = 2000000) {
    auto patterns = degree_patterns(f, primes);
    int n = f.degree();
    std::vector<bool> allowed(static_cast<std::size_t>(n) + 1, true);
    for (auto& [p, pat] : patterns) {
        auto reach = detail::subset_sums(pat, n);
        for (int s = 0; s <= n; ++s) allowed[static_cast<std::size_t>(s)] = allowed[static_cast<std::size_t>(s)] && reach[static_cast<std::size_t>(s)];
    }
    // The number of linear factors is known exactly, which the patterns alone cannot see.
    const int ones = detail::count_rational_roots(f.primitive_integer());
    allowed[1] = ones > 0;
    std::vector<int> parts;
    for (int s = n; s >= 1; --s)
        if (allowed[static_cast<std::size_t>(s)]) parts.push_back(s);
    std::set<DegreeMultiset> out;
    std::vector<int> current;
    std::size_t visited = 0;
    std::function<void(int, std::size_t)> rec = [&](int remaining, std::size_t from) {
        if (++visited > cap) throw Error("certify_factor_degrees: candidate enumeration cap exceeded");
        if (remaining == 0) {
            if (std::count(current.begin(), current.end(), 1) != ones) return;
            for (auto& [p, pat] : patterns)
                if (!detail::packs(pat, current)) return;
            DegreeMultiset m(current.rbegin(), current.rend());
            out.insert(m);
            return;
        }
        for (std::size_t i = from; i < parts.size(); ++i) {
            if (parts[i] > remaining) continue;
            current.push_back(parts[i]);
            rec(remaining - parts[i], i);
            current.pop_back();
        }
    };
    if (n >= 1) rec(n, 0);
    return out;
}

}  // namespace isogate
