#pragma once

// X_0(91): the canonical model as 10 quadrics in P^6, the Atkin-Lehner involution w_91, the
// cusps and the CM pair over Q(sqrt 13), and point counts / Jacobian orders of the genus-2
// quotient y^2 = f(x) over small finite fields.

#include "isogate/arith.hpp"
#include "isogate/poly.hpp"
#include "isogate/polyfp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace isogate::x091 {

class ModelIntegrityError : public Error {
public:
    using Error::Error;
};

constexpr int kVars = 7;

/// One homogeneous quadric in x0..x6, stored as monomial coefficients x_i x_j with i <= j.
class Quadric {
public:
    using Table = std::map<std::pair<int, int>, Integer>;

    Quadric() = default;
    explicit Quadric(Table t) : t_(std::move(t)) {
        for (auto it = t_.begin(); it != t_.end();) {
            auto [i, j] = it->first;
            if (i < 0 || j >= kVars || i > j) throw ModelIntegrityError("bad quadric monomial");
            it = it->second == 0 ? t_.erase(it) : std::next(it);
        }
    }

    const Table& terms() const { return t_; }

    /// Coefficient of x_i x_j (order-insensitive).
    Integer coeff(int i, int j) const {
        auto it = t_.find(i <= j ? std::make_pair(i, j) : std::make_pair(j, i));
        return it == t_.end() ? Integer(0) : it->second;
    }

    template <typename T>
    T eval(const std::array<T, kVars>& x, const T& zero) const {
        T acc = zero;
        for (const auto& [ij, c] : t_) acc = acc + Rational(c) * (x[static_cast<std::size_t>(ij.first)] *
                                                                  x[static_cast<std::size_t>(ij.second)]);
        return acc;
    }

    /// Display form, e.g. "x0^2 - 12*x1*x2 + 4*x1*x4".
    std::string to_string() const {
        std::string out;
        for (const auto& [ij, c] : t_) {
            Integer a = abs(c);
            if (out.empty()) out += c < 0 ? "-" : "";
            else out += c < 0 ? " - " : " + ";
            if (a != 1) out += a.get_str() + "*";
            auto [i, j] = ij;
            out += i == j ? "x" + std::to_string(i) + "^2"
                          : "x" + std::to_string(i) + "*x" + std::to_string(j);
        }
        return out.empty() ? "0" : out;
    }

    friend bool operator==(const Quadric& a, const Quadric& b) { return a.t_ == b.t_; }

private:
    Table t_;
};

/// Parses the display form produced by Quadric::to_string (spaces optional).
inline Quadric parse_quadric(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ParseError("empty quadric");
    Quadric::Table t;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
        throw ParseError("quadric '" + text + "' at offset " + std::to_string(pos) + ": " + why);
    };
    auto read_var = [&]() {
        if (pos >= s.size() || s[pos] != 'x') fail("expected variable");
        ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected variable index");
        int v = s[pos++] - '0';
        if (v >= kVars) fail("variable index out of range");
        return v;
    };
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        } else if (!t.empty()) {
            fail("expected '+' or '-'");
        }
        Integer c = 1;
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos > start) {
            c = Integer(s.substr(start, pos - start), 10);
            if (pos >= s.size() || s[pos] != '*') fail("expected '*' after coefficient");
            ++pos;
        }
        int i = read_var();
        int j = -1;
        if (pos < s.size() && s[pos] == '^') {
            if (pos + 1 >= s.size() || s[pos + 1] != '2') fail("only squares are allowed");
            pos += 2;
            j = i;
        } else if (pos < s.size() && s[pos] == '*') {
            ++pos;
            j = read_var();
        } else {
            fail("monomial must have degree 2");
        }
        auto key = i <= j ? std::make_pair(i, j) : std::make_pair(j, i);
        t[key] += sign * c;
    }
    return Quadric(std::move(t));
}

/// The model as one quadric per line.
inline const char* kModelText =
    "x0^2 - 12*x1*x2 + 4*x1*x4 - 14*x2^2 + 12*x2*x3 + 24*x2*x4 - 14*x3^2 + 16*x3*x4 - 23*x4^2 - x5^2 - 4*x6^2\n"
    "x0*x1 - 6*x1*x2 + 6*x1*x4 - 3*x2^2 + 2*x2*x3 + 7*x2*x4 - 5*x3^2 + 8*x3*x4 - 7*x4^2 - x5*x6 - x6^2\n"
    "x0*x2 - 2*x1*x2 + x1*x4 - 3*x2^2 + 6*x2*x3 + 4*x2*x4 - 5*x3^2 + 4*x3*x4 - 3*x4^2 - x6^2\n"
    "x0*x3 - x1*x2 + x1*x4 + 2*x2*x3 - x2*x4 - x3^2 + x3*x4 + x4^2\n"
    "x0*x4 - x2^2 + 2*x2*x3 - x3^2 + 2*x4^2\n"
    "x0*x6 - x1*x5 + x2*x5 + x4*x6\n"
    "x1^2 - 2*x1*x2 - 3*x2^2 + 4*x2*x3 + 4*x2*x4 - 4*x3^2 + 4*x3*x4 - 4*x4^2 - x6^2\n"
    "x1*x3 - x1*x4 - x2^2 + x2*x3 + x2*x4 - x3*x4\n"
    "x1*x6 - x2*x5 + x3*x5\n"
    "x2*x6 - x3*x5 + x4*x5 - x4*x6\n";

class QuadricModel {
public:
    explicit QuadricModel(std::vector<Quadric> q) : q_(std::move(q)) {
        if (q_.empty()) throw ModelIntegrityError("model has no quadrics");
    }
    const std::vector<Quadric>& quadrics() const { return q_; }
    std::size_t size() const { return q_.size(); }

    std::string to_string() const {
        std::string out;
        for (const auto& q : q_) out += q.to_string() + "\n";
        return out;
    }

private:
    std::vector<Quadric> q_;
};

inline QuadricModel parse_model(const std::string& text) {
    std::vector<Quadric> qs;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) qs.push_back(parse_quadric(line));
    return QuadricModel(std::move(qs));
}

inline const QuadricModel& canonical_model() {
    static const QuadricModel m = [] {
        QuadricModel model = parse_model(kModelText);
        if (model.size() != 10 || model.to_string() != kModelText)
            throw ModelIntegrityError("embedded model text does not round-trip");
        return model;
    }();
    return m;
}

/// A point of P^6 with coordinates in Q or in one field Q(sqrt d); d == 0 marks a rational point.
class ProjPoint {
public:
    static ProjPoint rational(const std::array<Rational, kVars>& x) {
        ProjPoint p;
        p.a_ = x;
        p.check_nonzero();
        return p;
    }
    static ProjPoint quadratic(const std::vector<QuadExt>& x) {
        if (x.size() != kVars) throw Error("a point of P^6 needs 7 coordinates");
        ProjPoint p;
        p.d_ = x[0].d();
        for (std::size_t i = 0; i < kVars; ++i) {
            if (x[i].d() != p.d_) throw Error("mixed quadratic fields in point coordinates");
            p.a_[i] = x[i].a();
            p.b_[i] = x[i].b();
        }
        if (std::all_of(p.b_.begin(), p.b_.end(), [](const Rational& b) { return b == 0; })) p.d_ = 0;
        p.check_nonzero();
        return p;
    }

    bool is_rational() const { return d_ == 0; }
    const Integer& field() const { return d_; }

    QuadExt coord(std::size_t i) const { return QuadExt(a_[i], b_[i], d_ == 0 ? Integer(-1) : d_); }
    std::array<QuadExt, kVars> coords() const {
        return {coord(0), coord(1), coord(2), coord(3), coord(4), coord(5), coord(6)};
    }
    const std::array<Rational, kVars>& rational_part() const { return a_; }

    /// Scales so that the last nonzero coordinate is 1.
    ProjPoint canonical() const {
        std::size_t k = kVars;
        while (k-- > 0)
            if (a_[k] != 0 || b_[k] != 0) break;
        if (is_rational()) {
            std::array<Rational, kVars> x = a_;
            Rational s = x[k];
            for (auto& v : x) v /= s;
            return rational(x);
        }
        QuadExt inv = coord(k).inverse();
        std::vector<QuadExt> x;
        for (std::size_t i = 0; i < kVars; ++i) x.push_back(coord(i) * inv);
        return quadratic(x);
    }

    /// Galois conjugate sqrt d -> -sqrt d.
    ProjPoint conjugate() const {
        ProjPoint p = *this;
        for (auto& b : p.b_) b = -b;
        return p;
    }

    /// Same point of P^6 (canonical forms agree).
    bool same_point(const ProjPoint& o) const {
        ProjPoint x = canonical(), y = o.canonical();
        return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
    }

    ProjPoint with_signs(const std::array<int, kVars>& sign) const {
        ProjPoint p = *this;
        for (std::size_t i = 0; i < kVars; ++i) {
            p.a_[i] *= sign[i];
            p.b_[i] *= sign[i];
        }
        return p;
    }

    std::string to_string() const {
        std::string out = "(";
        for (std::size_t i = 0; i < kVars; ++i) {
            if (i) out += " : ";
            if (b_[i] == 0) out += isogate::to_string(a_[i]);
            else if (a_[i] == 0) out += "(" + isogate::to_string(b_[i]) + ")*sqrt(" + d_.get_str() + ")";
            else
                out += "(" + isogate::to_string(a_[i]) + " + (" + isogate::to_string(b_[i]) + ")*sqrt(" +
                       d_.get_str() + "))";
        }
        return out + ")";
    }

private:
    void check_nonzero() const {
        for (std::size_t i = 0; i < kVars; ++i)
            if (a_[i] != 0 || b_[i] != 0) return;
        throw Error("all coordinates of a projective point are zero");
    }

    std::array<Rational, kVars> a_{}, b_{};
    Integer d_ = 0;
};

struct Residue {
    Rational a, b;  // value a + b*sqrt(d)
    bool vanishes() const { return a == 0 && b == 0; }
};

struct ModelPointReport {
    std::vector<Residue> residues;  // one per quadric
    bool on_model = false;
    std::vector<std::size_t> failing() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < residues.size(); ++i)
            if (!residues[i].vanishes()) out.push_back(i + 1);
        return out;
    }
};

inline ModelPointReport verify_model_point(const QuadricModel& m, const ProjPoint& p) {
    ModelPointReport r;
    if (p.is_rational()) {
        for (const auto& q : m.quadrics()) r.residues.push_back({q.eval(p.rational_part(), Rational(0)), 0});
    } else {
        auto x = p.coords();
        QuadExt zero = QuadExt::rational(0, p.field());
        for (const auto& q : m.quadrics()) {
            QuadExt v = q.eval(x, zero);
            r.residues.push_back({v.a(), v.b()});
        }
    }
    r.on_model = std::all_of(r.residues.begin(), r.residues.end(), [](const Residue& v) { return v.vanishes(); });
    return r;
}

constexpr std::array<int, kVars> kW91Signs{1, 1, 1, 1, 1, -1, -1};

/// w_91: negates x5 and x6; the result is in canonical form.
inline ProjPoint atkin_lehner(const ProjPoint& p) { return p.with_signs(kW91Signs).canonical(); }

/// Sign s with q(w x) = s q(x) for each quadric; throws when some quadric is not an eigenvector.
inline std::vector<int> involution_consistency(const QuadricModel& m) {
    std::vector<int> out;
    for (std::size_t k = 0; k < m.size(); ++k) {
        int sign = 0;
        for (const auto& [ij, c] : m.quadrics()[k].terms()) {
            int s = kW91Signs[static_cast<std::size_t>(ij.first)] * kW91Signs[static_cast<std::size_t>(ij.second)];
            if (sign != 0 && s != sign)
                throw ModelIntegrityError("quadric " + std::to_string(k + 1) + " is not mapped to +/- itself by w_91");
            sign = s;
        }
        out.push_back(sign == 0 ? 1 : sign);
    }
    return out;
}

inline std::string sign_pattern_string(const std::vector<int>& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) out += std::string(i ? "," : "") + (s[i] > 0 ? "+" : "-");
    return out + ")";
}

inline std::vector<ProjPoint> cusps() {
    auto R = [](std::array<long, kVars> v) {
        std::array<Rational, kVars> x;
        for (std::size_t i = 0; i < kVars; ++i) x[i] = v[i];
        return ProjPoint::rational(x);
    };
    return {R({1, 0, 0, 0, 0, 1, 0}), R({-1, 0, 0, 0, 0, 1, 0}), R({2, 0, -1, -1, -1, 1, 1}),
            R({-2, 0, 1, 1, 1, 1, 1})};
}

/// P = ((-8a+7)/5 : (3a-7)/5 : (-a+9)/5 : a : 1 : 0 : 0) with a = (17 + 5 sqrt 13)/18.
inline ProjPoint cm_point() {
    const Integer d = 13;
    QuadExt a(Rational(17, 18), Rational(5, 18), d);
    auto lin = [&](long u, long v) { return Rational(1, 5) * (Rational(u) * a + Rational(v)); };
    QuadExt one = QuadExt::rational(1, d), zero = QuadExt::rational(0, d);
    return ProjPoint::quadratic({lin(-8, 7), lin(3, -7), lin(-1, 9), a, one, zero, zero});
}

// ---------------------------------------------------------------------------------------------
// Genus-2 quotient

class HypCurve {
public:
    explicit HypCurve(PolyQ f) : f_(std::move(f)) {
        if (f_.degree() != 6) throw Error("hyperelliptic model must have degree 6");
        for (const auto& c : f_.coeffs())
            if (c.get_den() != 1) throw Error("hyperelliptic model must have integer coefficients");
        if (poly_gcd(f_, f_.derivative()).degree() > 0) throw Error("hyperelliptic model is not square-free");
        for (const auto& c : f_.coeffs()) z_.push_back(c.get_num());
    }
    const PolyQ& f() const { return f_; }
    const ZCoeffs& integer_coeffs() const { return z_; }
    std::string to_string() const { return "y^2 = " + f_.to_string("x"); }

private:
    PolyQ f_;
    ZCoeffs z_;
};

inline const HypCurve& quotient_curve() {
    static const HypCurve c(PolyQ({1, 2, -1, -8, -1, 2, 1}));
    return c;
}

class BadReductionError : public Error {
public:
    explicit BadReductionError(std::uint64_t p)
        : Error("p = " + std::to_string(p) + " is not an odd prime of good reduction"), p(p) {}
    std::uint64_t p;
};

namespace detail {

/// F_{p^k} for k in {1, 2}; elements a + b t with t^2 = r, encoded as a + b p.
struct SmallField {
    std::uint64_t p, r, k;
    SmallField(std::uint64_t p_, int k_) : p(p_), r(0), k(static_cast<std::uint64_t>(k_)) {
        if (k == 2) {
            std::vector<bool> sq(p, false);
            for (std::uint64_t x = 0; x < p; ++x) sq[x * x % p] = true;
            for (r = 1; sq[r]; ++r) {}
        }
    }
    std::uint64_t size() const { return k == 1 ? p : p * p; }
    std::uint64_t mul(std::uint64_t x, std::uint64_t y) const {
        std::uint64_t a = x % p, b = x / p, c = y % p, d = y / p;
        return (a * c + b * d % p * r) % p + ((a * d + b * c) % p) * p;
    }
    std::uint64_t add(std::uint64_t x, std::uint64_t y) const {
        return (x % p + y % p) % p + ((x / p + y / p) % p) * p;
    }
};

}  // namespace detail

inline void require_good_odd_prime(const HypCurve& c, std::uint64_t p) {
    if (p < 3 || !is_prime_u64(p) || !is_good_reduction(c.integer_coeffs(), p)) throw BadReductionError(p);
}

/// #C(F_{p^k}) for k in {1, 2}: affine points by enumeration plus the points at infinity.
inline std::uint64_t count_points(const HypCurve& c, std::uint64_t p, int k) {
    if (k != 1 && k != 2) throw Error("count_points supports k = 1 or 2");
    require_good_odd_prime(c, p);
    detail::SmallField F(p, k);
    const std::uint64_t q = F.size();
    std::vector<bool> square(q, false);
    for (std::uint64_t x = 0; x < q; ++x) square[F.mul(x, x)] = true;
    std::vector<std::uint64_t> coeff;
    for (const auto& z : c.integer_coeffs()) coeff.push_back(mod_u64(z, p));
    std::uint64_t n = 0;
    for (std::uint64_t x = 0; x < q; ++x) {
        std::uint64_t v = 0;
        for (std::size_t i = coeff.size(); i-- > 0;) v = F.add(F.mul(v, x), coeff[i]);
        n += v == 0 ? 1 : (square[v] ? 2 : 0);
    }
    n += square[coeff.back()] ? 2 : 0;
    return n;
}

struct ZetaData {
    std::uint64_t p = 0;
    std::uint64_t n1 = 0, n2 = 0;
    Integer c1, c2;
    Integer jacobian_order;
};

inline ZetaData jacobian_order(const HypCurve& c, std::uint64_t p) {
    ZetaData z;
    z.p = p;
    z.n1 = count_points(c, p, 1);
    z.n2 = count_points(c, p, 2);
    const Integer P(static_cast<unsigned long>(p));
    z.c1 = Integer(static_cast<unsigned long>(z.n1)) - P - 1;
    Integer twice_c2 = Integer(static_cast<unsigned long>(z.n2)) - P * P - 1 + z.c1 * z.c1;
    if (twice_c2 % 2 != 0) throw Error("internal: c2 is not an integer at p = " + std::to_string(p));
    z.c2 = twice_c2 / 2;
    if (z.c1 * z.c1 > 16 * P) throw Error("internal: Weil bound violated at p = " + std::to_string(p));
    z.jacobian_order = 1 + z.c1 + z.c2 + P * z.c1 + P * P;
    if (z.jacobian_order <= 0) throw Error("internal: non-positive Jacobian order at p = " + std::to_string(p));
    return z;
}

/// #J(F_p) by enumerating Mumford pairs. Every degree-2 class is effective and only the
/// canonical class has a positive-dimensional fibre (a P^1), so #J = #Sym^2 C(F_p) - p, where
/// Sym^2 C(F_p) consists of the pairs (u, v) with deg u = 2, the p vertical divisors
/// P + iota(P), the affine points paired with either point at infinity, and the 3 divisors
/// supported at infinity.
inline Integer mumford_jacobian_order(const HypCurve& c, std::uint64_t p) {
    if (p > 5) throw Error("Mumford enumeration is limited to p <= 5");
    require_good_odd_prime(c, p);
    if (c.integer_coeffs().back() != 1) throw Error("Mumford enumeration expects a monic model");
    PolyFp f = PolyFp::from_integers(p, c.integer_coeffs());
    std::uint64_t m1 = 0, m2 = 0;
    for (std::uint64_t a = 0; a < p; ++a) {
        std::uint64_t fa = 0;
        for (std::size_t i = f.coeffs().size(); i-- > 0;) fa = (fa * a + f.coeffs()[i]) % p;
        for (std::uint64_t v = 0; v < p; ++v)
            if (v * v % p == fa) ++m1;
    }
    for (std::uint64_t u0 = 0; u0 < p; ++u0)
        for (std::uint64_t u1 = 0; u1 < p; ++u1) {
            PolyFp u(p, {u0, u1, 1});
            for (std::uint64_t v0 = 0; v0 < p; ++v0)
                for (std::uint64_t v1 = 0; v1 < p; ++v1) {
                    PolyFp v(p, {v0, v1});
                    if (((v * v - f) % u).is_zero()) ++m2;
                }
        }
    std::uint64_t sym2 = m2 + p + 2 * m1 + 3;
    return Integer(static_cast<unsigned long>(sym2 - p));
}

/// gcd of #J(F_p) over the given odd primes of good reduction.
inline Integer torsion_multiple(const HypCurve& c, const std::vector<std::uint64_t>& primes) {
    if (primes.empty()) throw Error("torsion_multiple needs at least one prime");
    Integer g = 0;
    for (auto p : primes) g = igcd(g, jacobian_order(c, p).jacobian_order);
    return g;
}

namespace literature {
inline const char* kMordellWeil = "J0(91)(Q) = Z^2 + Z/2 + Z/168";
inline const char* kTorsionBound = "#J0(91)(Q)_tors <= 336 (primes 3, 5, 19)";
inline const char* kRank = "rank J0(91)(Q) = 2";
inline const char* kChabauty =
    "exceptional quadratic points of X0(91): the 4 cusps and the CM pair P, P^sigma (relative symmetric Chabauty)";
}  // namespace literature

}  // namespace isogate::x091
