#pragma once

// Matching j-invariant parametrisations against constants and against each other.

#include "isogate/factor.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace isogate {

struct JFamily {
    std::string name;
    PolyQ f;  // numerator
    PolyQ g;  // denominator
    char parameter = 'h';

    Rational operator()(const Rational& x) const {
        Rational den = g(x);
        if (den == 0) throw Error("family " + name + " has a pole at " + to_string(x));
        return f(x) / den;
    }
    bool has_pole(const Rational& x) const { return g(x) == 0; }
};

class UnknownFamily : public Error {
public:
    using Error::Error;
};

namespace detail {

inline PolyQ ipoly(std::initializer_list<long> coeffs_high_first) {
    std::vector<long> v(coeffs_high_first);
    std::reverse(v.begin(), v.end());
    std::vector<Rational> r(v.begin(), v.end());
    return PolyQ(std::move(r));
}

}  // namespace detail

inline const std::vector<std::string>& builtin_family_names() {
    static const std::vector<std::string> names = {"j13", "j7", "j5", "j3cube", "j2disc", "j2iso", "jNs7"};
    return names;
}

inline JFamily builtin_family(const std::string& name) {
    using detail::ipoly;
    const PolyQ h = PolyQ::x();
    if (name == "j13")
        return {name, ipoly({1, 5, 13}) * ipoly({1, 7, 20, 19, 1}).pow(3), h, 'h'};
    if (name == "j7") return {name, ipoly({1, 13, 49}) * ipoly({1, 5, 1}).pow(3), h, 'h'};
    if (name == "j5") return {name, ipoly({1, 10, 5}).pow(3), h, 'h'};
    if (name == "j3cube") return {name, h.pow(3), PolyQ::constant(1), 'h'};
    if (name == "j2disc") return {name, ipoly({1, 0, 1728}), PolyQ::constant(1), 'h'};
    if (name == "j2iso") return {name, ipoly({1, 16}).pow(3), h, 's'};
    if (name == "jNs7") {
        PolyQ num = h * ipoly({1, 1}).pow(3) * ipoly({1, -5, 1}).pow(3) * ipoly({1, -5, 8}).pow(3) *
                    ipoly({1, -5, 8, -7, 7}).pow(3);
        return {name, num, ipoly({1, -4, 3, 1}).pow(7), 't'};
    }
    throw UnknownFamily("unknown j-family '" + name + "'");
}

// ---------------------------------------------------------------------------
// Matching against a constant

enum class MatchVerdict { NoDegreeLE2Root, RationalRoot, QuadraticRoot };

inline std::string to_string(MatchVerdict v) {
    switch (v) {
        case MatchVerdict::NoDegreeLE2Root: return "NoDegreeLE2Root";
        case MatchVerdict::RationalRoot: return "RationalRoot";
        case MatchVerdict::QuadraticRoot: return "QuadraticRoot";
    }
    return "?";
}

struct MatchOutcome {
    PolyQ elimination;                      // primitive integer polynomial
    std::vector<LowDegreeFactor> factors;   // degree <= 2 factors, poles removed
    MatchVerdict verdict = MatchVerdict::NoDegreeLE2Root;
    std::vector<Rational> rational_roots;   // sorted
    std::vector<Integer> quadratic_fields;  // squarefree d, sorted, deduplicated
};

inline MatchOutcome outcome_from_factors(PolyQ elimination, std::vector<LowDegreeFactor> factors) {
    MatchOutcome out;
    out.elimination = std::move(elimination);
    out.factors = std::move(factors);
    for (const auto& lf : out.factors) {
        if (lf.root) out.rational_roots.push_back(*lf.root);
        if (lf.field) out.quadratic_fields.push_back(*lf.field);
    }
    std::sort(out.rational_roots.begin(), out.rational_roots.end());
    std::sort(out.quadratic_fields.begin(), out.quadratic_fields.end());
    out.quadratic_fields.erase(std::unique(out.quadratic_fields.begin(), out.quadratic_fields.end()),
                               out.quadratic_fields.end());
    if (!out.rational_roots.empty())
        out.verdict = MatchVerdict::RationalRoot;
    else if (!out.quadratic_fields.empty())
        out.verdict = MatchVerdict::QuadraticRoot;
    return out;
}

/// Solves fam(x) = c for x of degree at most 2 over Q.
inline MatchOutcome match_constant(const JFamily& fam, Rational c) {
    c.canonicalize();
    PolyQ diff = fam.f - c * fam.g;
    if (diff.is_zero()) throw Error("family " + fam.name + " is constant");
    PolyQ elim = PolyQ::from_integers(diff.primitive_integer());
    std::vector<LowDegreeFactor> kept;
    for (auto& lf : low_degree_factors(elim, 2)) {
        // A common factor with g would be a pole, not a solution.
        if (poly_gcd(lf.factor, fam.g).degree() > 0) continue;
        kept.push_back(std::move(lf));
    }
    return outcome_from_factors(std::move(elim), std::move(kept));
}

/// What a caller needs ruled out: any root of degree <= 2, or only rational roots.
enum class Requirement { NoDegreeLE2Root, NoRationalRoot };

inline std::string to_string(Requirement r) {
    return r == Requirement::NoDegreeLE2Root ? "NoDegreeLE2Root" : "NoRationalRoot";
}

inline bool eliminates(const MatchOutcome& m, Requirement r) {
    if (r == Requirement::NoRationalRoot) return m.rational_roots.empty();
    return m.verdict == MatchVerdict::NoDegreeLE2Root;
}

// ---------------------------------------------------------------------------
// Bivariate matching curves

/// Polynomial in (t, s), stored as coefficients of s^k, each a polynomial in t.
class BiPoly {
public:
    BiPoly() = default;
    explicit BiPoly(std::map<int, PolyQ> terms) : terms_(std::move(terms)) { trim(); }

    /// p(t) as a bivariate polynomial.
    static BiPoly in_t(const PolyQ& p) { return BiPoly({{0, p}}); }
    /// p(s) as a bivariate polynomial.
    static BiPoly in_s(const PolyQ& p) {
        std::map<int, PolyQ> m;
        for (int k = 0; k <= p.degree(); ++k)
            if (p.coeff(k) != 0) m[k] = PolyQ::constant(p.coeff(k));
        return BiPoly(std::move(m));
    }

    const std::map<int, PolyQ>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree_s() const { return terms_.empty() ? -1 : terms_.rbegin()->first; }
    int degree_t() const {
        int d = -1;
        for (const auto& [k, p] : terms_) d = std::max(d, p.degree());
        return d;
    }
    int total_degree() const {
        int d = -1;
        for (const auto& [k, p] : terms_) d = std::max(d, k + p.degree());
        return d;
    }
    Rational coeff(int i, int k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? Rational(0) : it->second.coeff(static_cast<std::size_t>(i));
    }

    Rational eval(const Rational& t, const Rational& s) const {
        Rational acc = 0, sk = 1;
        int prev = 0;
        for (const auto& [k, p] : terms_) {
            for (; prev < k; ++prev) sk *= s;
            acc += p(t) * sk;
        }
        return acc;
    }

    /// Value of the homogenisation z^D F(t/z, s/z) at (t : s : z), D the total degree.
    Rational eval_projective(const Rational& t, const Rational& s, const Rational& z) const {
        const int D = total_degree();
        Rational acc = 0;
        for (const auto& [k, p] : terms_)
            for (int i = 0; i <= p.degree(); ++i) {
                if (p.coeff(i) == 0) continue;
                acc += p.coeff(i) * rpow(t, i) * rpow(s, k) * rpow(z, D - i - k);
            }
        return acc;
    }

    /// F(t, s0) as a polynomial in t.
    PolyQ at_s(const Rational& s0) const {
        PolyQ acc;
        for (const auto& [k, p] : terms_) acc = acc + rpow(s0, k) * p;
        return acc;
    }

    /// Clears denominators and divides by the integer content; positive leading term in (s, t).
    BiPoly primitive() const {
        if (is_zero()) return *this;
        Integer den = 1, g = 0;
        for (const auto& [k, p] : terms_)
            for (const auto& c : p.coeffs()) den = ilcm(den, c.get_den());
        for (const auto& [k, p] : terms_)
            for (const auto& c : p.coeffs()) g = igcd(g, Integer(c.get_num() * (den / c.get_den())));
        Rational scale = Rational(den) / Rational(g);
        if (terms_.rbegin()->second.leading() < 0) scale = -scale;
        std::map<int, PolyQ> m;
        for (const auto& [k, p] : terms_) m[k] = scale * p;
        return BiPoly(std::move(m));
    }

    friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
        std::map<int, PolyQ> m = a.terms_;
        for (const auto& [k, p] : b.terms_) m[k] = m[k] + p;
        return BiPoly(std::move(m));
    }
    friend BiPoly operator-(const BiPoly& a) {
        std::map<int, PolyQ> m;
        for (const auto& [k, p] : a.terms_) m[k] = -p;
        return BiPoly(std::move(m));
    }
    friend BiPoly operator-(const BiPoly& a, const BiPoly& b) { return a + (-b); }
    friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
        std::map<int, PolyQ> m;
        for (const auto& [i, p] : a.terms_)
            for (const auto& [j, q] : b.terms_) m[i + j] = m[i + j] + p * q;
        return BiPoly(std::move(m));
    }
    friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.terms_ == b.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!out.empty()) out += " + ";
            out += "(" + it->second.to_string("t") + ")";
            if (it->first == 1) out += "*s";
            if (it->first > 1) out += "*s^" + std::to_string(it->first);
        }
        return out;
    }

private:
    void trim() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->second.is_zero())
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    std::map<int, PolyQ> terms_;
};

/// Numerator of famA(t) - famB(s): fA(t) gB(s) - fB(s) gA(t), made primitive.
inline BiPoly match_families(const JFamily& a, const JFamily& b) {
    BiPoly lhs = BiPoly::in_t(a.f) * BiPoly::in_s(b.g);
    BiPoly rhs = BiPoly::in_s(b.f) * BiPoly::in_t(a.g);
    return (lhs - rhs).primitive();
}

struct ProjectivePoint {
    Rational t, s, z;
    std::string to_string() const {
        return "(" + isogate::to_string(t) + " : " + isogate::to_string(s) + " : " + isogate::to_string(z) + ")";
    }
};

struct PointReport {
    ProjectivePoint point;
    bool on_curve = false;
    std::optional<Rational> j;  // affine points away from poles of famB
    std::string note;
};

/// Checks each point on the homogenised curve; affine points (z != 0) get j = famB(s/z).
inline std::vector<PointReport> verify_match_points(const BiPoly& curve, const std::vector<ProjectivePoint>& points,
                                                    const JFamily& famB) {
    std::vector<PointReport> out;
    for (const auto& pt : points) {
        PointReport r{pt, false, std::nullopt, ""};
        if (pt.t == 0 && pt.s == 0 && pt.z == 0) {
            r.note = "not a projective point";
            out.push_back(r);
            continue;
        }
        r.on_curve = curve.eval_projective(pt.t, pt.s, pt.z) == 0;
        if (!r.on_curve) {
            r.note = "curve equation does not vanish";
        } else if (pt.z == 0) {
            r.note = "point at infinity";
        } else {
            Rational s = pt.s / pt.z;
            if (famB.has_pole(s))
                r.note = "pole of " + famB.name;
            else
                r.j = famB(s);
        }
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Small-height search on x = fam(h) for curves of the form "j is a square + 1728" or "j is a cube"

inline std::optional<Rational> exact_root(const Rational& q, unsigned k) {
    auto iroot = [k](const Integer& n) -> std::optional<Integer> {
        if (n < 0 && k % 2 == 0) return std::nullopt;
        Integer a = abs(n), r;
        if (!mpz_root(r.get_mpz_t(), a.get_mpz_t(), k)) return std::nullopt;
        return n < 0 ? Integer(-r) : r;
    };
    auto n = iroot(q.get_num());
    auto d = iroot(q.get_den());
    if (!n || !d) return std::nullopt;
    return make_rational(*n, *d);
}

/// All h = a/b with |a|, b <= bound, gcd(a, b) = 1, away from poles, for which pred(fam(h)) holds.
template <typename Pred>
std::vector<Rational> small_height_parameters(const JFamily& fam, int bound, Pred pred) {
    std::vector<Rational> hits;
    for (int b = 1; b <= bound; ++b)
        for (int a = -bound; a <= bound; ++a) {
            if (std::gcd(a, b) != 1) continue;
            Rational h = make_rational(a, b);
            if (fam.has_pole(h)) continue;
            if (pred(fam(h))) hits.push_back(h);
        }
    std::sort(hits.begin(), hits.end());
    return hits;
}

// ---------------------------------------------------------------------------
// Known j-invariants with a rational isogeny of degree 37, 17, 11

inline std::vector<Rational> isolated_j_invariants(int q) {
    auto p3 = [](long x) { return Rational(ipow(Integer(x), 3)); };
    switch (q) {
        case 37: return {-7 * p3(11), -7 * p3(137) * p3(2083)};
        case 17: return {-17 * p3(373) / Rational(ipow(2, 17)), Rational(-289) * p3(101) / 2};
        case 11: return {-11 * p3(131), Rational(-121)};
        default: throw Error("no isolated j-invariants stored for level " + std::to_string(q));
    }
}

}  // namespace isogate
