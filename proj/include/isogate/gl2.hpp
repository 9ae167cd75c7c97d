#pragma once

// 2x2 matrices over Z/mZ, realized subgroups of GL2(Z/mZ), and the orbit and
// conjugacy computations built on them.

#include "isogate/arith.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace isogate {

class InvalidGenerator : public Error {
public:
    using Error::Error;
};

class SizeLimitError : public Error {
public:
    using Error::Error;
};

class UnsupportedGroup : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kDefaultGroupCap = 10'000'000;
inline constexpr std::uint32_t kMaxModulus = 255;  // codes must fit in 32 bits

namespace modarith {

inline std::uint32_t gcd(std::uint32_t a, std::uint32_t b) { return std::gcd(a, b); }

inline bool is_unit(std::int64_t x, std::uint32_t m) {
    std::int64_t r = ((x % m) + m) % m;
    return gcd(static_cast<std::uint32_t>(r), m) == 1;
}

inline std::uint32_t inverse(std::uint32_t x, std::uint32_t m) {
    std::int64_t t = 0, nt = 1, r = m, nr = x % m;
    while (nr != 0) {
        std::int64_t q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw Error("residue " + std::to_string(x) + " is not a unit mod " + std::to_string(m));
    return static_cast<std::uint32_t>((t % static_cast<std::int64_t>(m) + m) % m);
}

/// Radical of m (product of distinct prime divisors).
inline std::uint32_t radical(std::uint32_t m) {
    std::uint32_t r = 1;
    for (auto [q, e] : factor_u64(m)) r *= static_cast<std::uint32_t>(q);
    return r;
}

/// psi(m) = m * prod_{q | m} (1 + 1/q), the number of cyclic subgroups of order m in (Z/m)^2.
inline std::uint64_t psi(std::uint64_t m) {
    std::uint64_t r = m;
    for (auto [q, e] : factor_u64(m)) r = r / q * (q + 1);
    return r;
}

/// |GL2(Z/m)| = prod over q^e || m of q^(4(e-1)) (q^2-1)(q^2-q).
inline std::uint64_t gl2_order(std::uint64_t m) {
    std::uint64_t r = 1;
    for (auto [q, e] : factor_u64(m)) {
        std::uint64_t t = (q * q - 1) * (q * q - q);
        for (int i = 1; i < e; ++i) t *= q * q * q * q;
        r *= t;
    }
    return r;
}

/// Prime-power decomposition m = p^k; nullopt when m is not a prime power.
inline std::optional<std::pair<std::uint32_t, int>> prime_power(std::uint32_t m) {
    auto f = factor_u64(m);
    if (f.size() != 1) return std::nullopt;
    return std::make_pair(static_cast<std::uint32_t>(f[0].first), f[0].second);
}

inline std::uint32_t least_nonresidue(std::uint32_t p) {
    for (std::uint32_t e = 2; e < p; ++e) {
        bool square = false;
        for (std::uint32_t x = 1; x < p && !square; ++x) square = (x * x) % p == e;
        if (!square) return e;
    }
    throw UnsupportedGroup("no quadratic non-residue mod " + std::to_string(p));
}

}  // namespace modarith

struct MatZmod {
    std::uint32_t m = 2;
    std::uint32_t a = 1, b = 0, c = 0, d = 1;

    MatZmod() = default;
    MatZmod(std::uint32_t mod, std::int64_t a_, std::int64_t b_, std::int64_t c_, std::int64_t d_) : m(mod) {
        if (mod < 2 || mod > kMaxModulus) throw Error("unsupported modulus " + std::to_string(mod));
        auto red = [mod](std::int64_t x) { return static_cast<std::uint32_t>(((x % mod) + mod) % mod); };
        a = red(a_);
        b = red(b_);
        c = red(c_);
        d = red(d_);
    }

    static MatZmod identity(std::uint32_t m) { return {m, 1, 0, 0, 1}; }
    static MatZmod scalar(std::uint32_t m, std::int64_t l) { return {m, l, 0, 0, l}; }
    static MatZmod diagonal(std::uint32_t m, std::int64_t x, std::int64_t y) { return {m, x, 0, 0, y}; }
    static MatZmod antidiagonal(std::uint32_t m, std::int64_t x, std::int64_t y) { return {m, 0, x, y, 0}; }

    std::uint32_t det() const {
        std::uint64_t ad = static_cast<std::uint64_t>(a) * d % m, bc = static_cast<std::uint64_t>(b) * c % m;
        return static_cast<std::uint32_t>((ad + m - bc) % m);
    }
    std::uint32_t trace() const { return (a + d) % m; }
    bool invertible() const { return modarith::gcd(det(), m) == 1; }
    bool is_scalar() const { return b == 0 && c == 0 && a == d; }
    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }

    /// Dense code ((a*m + b)*m + c)*m + d, unique for fixed m.
    std::uint32_t code() const { return ((a * m + b) * m + c) * m + d; }
    static MatZmod decode(std::uint32_t code, std::uint32_t m) {
        MatZmod r;
        r.m = m;
        r.d = code % m;
        code /= m;
        r.c = code % m;
        code /= m;
        r.b = code % m;
        r.a = code / m;
        return r;
    }

    MatZmod inverse() const {
        std::uint32_t di = modarith::inverse(det(), m);
        auto mul = [this](std::uint64_t x, std::uint64_t y) { return static_cast<std::int64_t>(x * y % m); };
        return {m, mul(d, di), -mul(b, di), -mul(c, di), mul(a, di)};
    }

    MatZmod reduce(std::uint32_t m2) const {
        if (m2 < 2 || m % m2 != 0) throw Error("cannot reduce mod " + std::to_string(m) + " to mod " + std::to_string(m2));
        return {m2, a, b, c, d};
    }

    MatZmod pow(std::uint64_t e) const {
        MatZmod r = identity(m), x = *this;
        while (e) {
            if (e & 1) r = r * x;
            e >>= 1;
            if (e) x = x * x;
        }
        return r;
    }

    friend MatZmod operator*(const MatZmod& x, const MatZmod& y) {
        if (x.m != y.m) throw Error("modulus mismatch in matrix product");
        const std::uint32_t m = x.m;
        MatZmod r;
        r.m = m;
        r.a = (x.a * y.a + x.b * y.c) % m;
        r.b = (x.a * y.b + x.b * y.d) % m;
        r.c = (x.c * y.a + x.d * y.c) % m;
        r.d = (x.c * y.b + x.d * y.d) % m;
        return r;
    }
    friend bool operator==(const MatZmod& x, const MatZmod& y) {
        return x.m == y.m && x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }
    friend bool operator<(const MatZmod& x, const MatZmod& y) {
        return std::tie(x.m, x.a, x.b, x.c, x.d) < std::tie(y.m, y.a, y.b, y.c, y.d);
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
        return os.str();
    }
};

inline std::ostream& operator<<(std::ostream& os, const MatZmod& g) { return os << g.to_string(); }

/// Multiplicative order of an invertible matrix, found by stripping primes from |GL2(Z/m)|.
inline std::uint64_t element_order(const MatZmod& g, std::uint64_t exponent,
                                   const std::vector<std::pair<std::uint64_t, int>>& exponent_factors) {
    std::uint64_t e = exponent;
    for (auto [q, k] : exponent_factors)
        while (e % q == 0 && g.pow(e / q).is_identity()) e /= q;
    return e;
}

inline std::uint64_t element_order(const MatZmod& g) {
    std::uint64_t n = modarith::gl2_order(g.m);
    return element_order(g, n, factor_u64(n));
}

/// A realized subgroup of GL2(Z/mZ). Immutable once built.
class MatrixGroup {
public:
    MatrixGroup() = default;
    MatrixGroup(std::uint32_t m, std::vector<MatZmod> gens, std::vector<std::uint32_t> sorted_codes)
        : m_(m), gens_(std::move(gens)), codes_(std::make_shared<const std::vector<std::uint32_t>>(std::move(sorted_codes))) {}

    std::uint32_t modulus() const { return m_; }
    const std::vector<MatZmod>& generators() const { return gens_; }
    const std::vector<std::uint32_t>& codes() const { return *codes_; }
    std::size_t order() const { return codes_->size(); }

    bool contains_code(std::uint32_t code) const { return std::binary_search(codes_->begin(), codes_->end(), code); }
    bool contains(const MatZmod& g) const { return g.m == m_ && contains_code(g.code()); }
    bool subset_of(const MatrixGroup& other) const {
        if (other.m_ != m_ || order() > other.order()) return false;
        return std::includes(other.codes().begin(), other.codes().end(), codes().begin(), codes().end());
    }

    std::vector<MatZmod> elements() const {
        std::vector<MatZmod> out;
        out.reserve(order());
        for (auto c : codes()) out.push_back(MatZmod::decode(c, m_));
        return out;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (auto c : codes()) f(MatZmod::decode(c, m_));
    }

    friend bool operator==(const MatrixGroup& x, const MatrixGroup& y) { return x.m_ == y.m_ && x.codes() == y.codes(); }

private:
    std::uint32_t m_ = 2;
    std::vector<MatZmod> gens_;
    std::shared_ptr<const std::vector<std::uint32_t>> codes_ = std::make_shared<const std::vector<std::uint32_t>>();
};

namespace detail {

/// Set of matrix codes: a bitmap when the code space is small enough, a hash set otherwise.
class CodeSet {
public:
    explicit CodeSet(std::uint32_t m) {
        std::uint64_t space = static_cast<std::uint64_t>(m) * m * m * m;
        if (space <= (1ULL << 28)) bits_.assign(space, false);
    }
    bool insert(std::uint32_t c) {
        if (!bits_.empty()) {
            if (bits_[c]) return false;
            bits_[c] = true;
            return true;
        }
        return hash_.insert(c).second;
    }
    bool contains(std::uint32_t c) const { return bits_.empty() ? hash_.count(c) > 0 : bits_[c]; }

private:
    std::vector<bool> bits_;
    std::unordered_set<std::uint32_t> hash_;
};

}  // namespace detail

/// Breadth-first closure of the generated subgroup. Throws SizeLimitError once more than `cap` elements appear.
inline MatrixGroup group_closure(const std::vector<MatZmod>& gens, std::uint32_t m, std::size_t cap = kDefaultGroupCap) {
    if (m < 2 || m > kMaxModulus) throw Error("unsupported modulus " + std::to_string(m));
    for (const auto& g : gens) {
        if (g.m != m) throw InvalidGenerator("generator " + g.to_string() + " has modulus " + std::to_string(g.m));
        if (!g.invertible()) throw InvalidGenerator("generator " + g.to_string() + " has non-unit determinant");
    }
    detail::CodeSet seen(m);
    std::vector<std::uint32_t> order;
    MatZmod id = MatZmod::identity(m);
    seen.insert(id.code());
    order.push_back(id.code());
    for (std::size_t head = 0; head < order.size(); ++head) {
        MatZmod x = MatZmod::decode(order[head], m);
        for (const auto& g : gens) {
            std::uint32_t c = (x * g).code();
            if (seen.insert(c)) {
                order.push_back(c);
                if (order.size() > cap)
                    throw SizeLimitError("group closure exceeded " + std::to_string(cap) + " elements");
            }
        }
    }
    std::sort(order.begin(), order.end());
    return MatrixGroup(m, gens, std::move(order));
}

/// Closure that stops (returning nullopt) once the group grows past `limit` elements.
inline std::optional<MatrixGroup> bounded_closure(const std::vector<MatZmod>& gens, std::uint32_t m, std::size_t limit) {
    try {
        return group_closure(gens, m, limit);
    } catch (const SizeLimitError&) {
        return std::nullopt;
    }
}

/// Greedy generating set for a subgroup given by its elements: scans in code order, keeping
/// each element not already generated.
inline std::vector<MatZmod> small_generating_set(const MatrixGroup& g) {
    std::vector<MatZmod> gens;
    MatrixGroup cur = group_closure({}, g.modulus());
    for (auto c : g.codes()) {
        if (cur.order() == g.order()) break;
        if (cur.contains_code(c)) continue;
        gens.push_back(MatZmod::decode(c, g.modulus()));
        cur = group_closure(gens, g.modulus());
    }
    return gens;
}

/// Generators of the unit group (Z/m)^x, chosen greedily in increasing order.
inline std::vector<std::uint32_t> unit_generators(std::uint32_t m) {
    std::vector<std::uint32_t> gens;
    std::vector<bool> in(m, false);
    in[1 % m] = true;
    for (std::uint32_t u = 2; u < m; ++u) {
        if (std::gcd(u, m) != 1 || in[u]) continue;
        gens.push_back(u);
        std::vector<std::uint32_t> members;
        for (std::uint32_t x = 0; x < m; ++x)
            if (in[x]) members.push_back(x);
        for (std::size_t i = 0; i < members.size(); ++i)
            for (auto g : gens) {
                auto y = static_cast<std::uint32_t>(static_cast<std::uint64_t>(members[i]) * g % m);
                if (!in[y]) {
                    in[y] = true;
                    members.push_back(y);
                }
            }
    }
    return gens;
}

enum class StandardGroup { Full, Borel, SplitCartanNormalizer, NonsplitCartanNormalizer, Scalars, SplitCartan, NonsplitCartan };

inline std::optional<StandardGroup> parse_standard_group(const std::string& name) {
    static const std::map<std::string, StandardGroup> names{
        {"full", StandardGroup::Full},
        {"borel", StandardGroup::Borel},
        {"split_cartan_normalizer", StandardGroup::SplitCartanNormalizer},
        {"nonsplit_cartan_normalizer", StandardGroup::NonsplitCartanNormalizer},
        {"scalars", StandardGroup::Scalars},
        {"split_cartan", StandardGroup::SplitCartan},
        {"nonsplit_cartan", StandardGroup::NonsplitCartan},
    };
    auto it = names.find(name);
    if (it == names.end()) return std::nullopt;
    return it->second;
}

inline MatrixGroup standard_group(StandardGroup kind, std::uint32_t m) {
    std::vector<MatZmod> gens;
    auto units = unit_generators(m);
    switch (kind) {
        case StandardGroup::Full:
            gens = {MatZmod(m, 1, 1, 0, 1), MatZmod(m, 1, 0, 1, 1)};
            for (auto u : units) gens.push_back(MatZmod::diagonal(m, u, 1));
            return group_closure(gens, m);
        case StandardGroup::Borel:
            gens = {MatZmod(m, 1, 1, 0, 1)};
            for (auto u : units) {
                gens.push_back(MatZmod::diagonal(m, u, 1));
                gens.push_back(MatZmod::diagonal(m, 1, u));
            }
            return group_closure(gens, m);
        case StandardGroup::Scalars:
            for (auto u : units) gens.push_back(MatZmod::scalar(m, u));
            return group_closure(gens, m);
        case StandardGroup::SplitCartan:
        case StandardGroup::SplitCartanNormalizer:
            if (!modarith::prime_power(m)) throw UnsupportedGroup("Cartan groups need a prime-power modulus, got " + std::to_string(m));
            for (auto u : units) {
                gens.push_back(MatZmod::diagonal(m, u, 1));
                gens.push_back(MatZmod::diagonal(m, 1, u));
            }
            if (kind == StandardGroup::SplitCartanNormalizer) gens.push_back(MatZmod::antidiagonal(m, 1, 1));
            return group_closure(gens, m);
        case StandardGroup::NonsplitCartan:
        case StandardGroup::NonsplitCartanNormalizer: {
            auto pp = modarith::prime_power(m);
            if (!pp) throw UnsupportedGroup("Cartan groups need a prime-power modulus, got " + std::to_string(m));
            if (pp->first == 2) throw UnsupportedGroup("nonsplit Cartan at p = 2 has no non-residue form");
            std::uint32_t eps = modarith::least_nonresidue(pp->first);
            std::vector<std::uint32_t> codes;
            for (std::uint32_t a = 0; a < m; ++a)
                for (std::uint32_t b = 0; b < m; ++b) {
                    MatZmod x(m, a, static_cast<std::int64_t>(b) * eps, b, a);
                    if (!x.invertible()) continue;
                    codes.push_back(x.code());
                    if (kind == StandardGroup::NonsplitCartanNormalizer) codes.push_back((x * MatZmod::diagonal(m, 1, -1)).code());
                }
            std::sort(codes.begin(), codes.end());
            MatrixGroup realized(m, {}, codes);
            auto small = small_generating_set(realized);
            return MatrixGroup(m, small, std::move(codes));
        }
    }
    throw Error("unknown standard group");
}

inline MatrixGroup standard_group(const std::string& name, std::uint32_t m) {
    auto kind = parse_standard_group(name);
    if (!kind) throw Error("unknown standard group '" + name + "'");
    return standard_group(*kind, m);
}

inline MatrixGroup reduce_mod(const MatrixGroup& g, std::uint32_t m2) {
    if (m2 < 2 || g.modulus() % m2 != 0)
        throw Error("cannot reduce a group mod " + std::to_string(g.modulus()) + " to mod " + std::to_string(m2));
    if (m2 == g.modulus()) return g;
    std::vector<std::uint32_t> codes;
    codes.reserve(g.order());
    g.for_each([&](const MatZmod& x) { codes.push_back(x.reduce(m2).code()); });
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    std::vector<MatZmod> gens;
    for (const auto& x : g.generators()) gens.push_back(x.reduce(m2));
    return MatrixGroup(m2, std::move(gens), std::move(codes));
}

/// Number of scalar matrices lambda*I in G with lambda = 1 mod p.
inline std::size_t scalar_count(const MatrixGroup& g, std::uint32_t p) {
    std::uint32_t m = g.modulus();
    if (p < 2 || m % p != 0) throw Error(std::to_string(p) + " does not divide the modulus " + std::to_string(m));
    std::size_t n = 0;
    for (std::uint32_t l = 1; l < m; l += p)
        if (g.contains(MatZmod::scalar(m, l))) ++n;
    return n;
}

/// Order of the subgroup of scalar matrices in G.
inline std::size_t scalar_subgroup_order(const MatrixGroup& g) {
    std::size_t n = 0;
    for (std::uint32_t l = 1; l < g.modulus(); ++l)
        if (std::gcd(l, g.modulus()) == 1 && g.contains(MatZmod::scalar(g.modulus(), l))) ++n;
    return n;
}

struct OrbitReport {
    std::size_t group_order = 0;
    std::size_t acted_on = 0;
    std::vector<std::size_t> lengths;  // sorted ascending

    std::size_t min_length() const { return lengths.empty() ? 0 : lengths.front(); }
    friend bool operator==(const OrbitReport& x, const OrbitReport& y) {
        return x.group_order == y.group_order && x.acted_on == y.acted_on && x.lengths == y.lengths;
    }
};

struct Vec2 {
    std::uint32_t x = 0, y = 0;
    friend bool operator==(const Vec2& u, const Vec2& v) { return u.x == v.x && u.y == v.y; }
    friend bool operator<(const Vec2& u, const Vec2& v) { return std::tie(u.x, u.y) < std::tie(v.x, v.y); }
};

inline Vec2 apply(const MatZmod& g, const Vec2& v) {
    return {(g.a * v.x + g.b * v.y) % g.m, (g.c * v.x + g.d * v.y) % g.m};
}

/// Additive order of v in (Z/m)^2 is m.
inline bool has_full_order(const Vec2& v, std::uint32_t m) { return std::gcd(std::gcd(v.x, v.y), m) == 1; }

/// Canonical generator of the cyclic subgroup generated by v (v of order m): (1, y) when the
/// first coordinate is a unit, (x, 1) when the second is, otherwise the lexicographically least
/// unit multiple.
inline Vec2 canonical_cyclic(const Vec2& v, std::uint32_t m) {
    auto scale = [m](const Vec2& w, std::uint32_t u) {
        return Vec2{static_cast<std::uint32_t>(static_cast<std::uint64_t>(w.x) * u % m),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(w.y) * u % m)};
    };
    if (std::gcd(v.x, m) == 1) return scale(v, modarith::inverse(v.x, m));
    if (std::gcd(v.y, m) == 1) return scale(v, modarith::inverse(v.y, m));
    Vec2 best = v;
    for (std::uint32_t u = 1; u < m; ++u)
        if (std::gcd(u, m) == 1) best = std::min(best, scale(v, u));
    return best;
}

/// The psi(m) canonical cyclic subgroups of order m, sorted.
inline std::vector<Vec2> cyclic_subgroup_reps(std::uint32_t m) {
    std::vector<Vec2> out;
    for (std::uint32_t x = 0; x < m; ++x)
        for (std::uint32_t y = 0; y < m; ++y) {
            Vec2 v{x, y};
            if (has_full_order(v, m) && canonical_cyclic(v, m) == v) out.push_back(v);
        }
    return out;
}

namespace detail {

inline OrbitReport orbits_of(const MatrixGroup& g, const std::vector<Vec2>& points,
                             const std::function<Vec2(const Vec2&)>& canon) {
    const std::uint32_t m = g.modulus();
    std::vector<std::int32_t> index(static_cast<std::size_t>(m) * m, -1);
    for (std::size_t i = 0; i < points.size(); ++i) index[points[i].x * m + points[i].y] = static_cast<std::int32_t>(i);
    std::vector<std::size_t> parent(points.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    // Orbits of a finite group are the orbits of any generating set.
    std::vector<MatZmod> gens = g.generators();
    if (gens.empty() && g.order() > 1) gens = g.elements();
    for (const auto& s : gens)
        for (std::size_t i = 0; i < points.size(); ++i) {
            Vec2 w = canon(apply(s, points[i]));
            auto j = index[w.x * m + w.y];
            if (j < 0) throw Error("orbit computation left the acted-on set");
            parent[find(i)] = find(static_cast<std::size_t>(j));
        }
    std::map<std::size_t, std::size_t> sizes;
    for (std::size_t i = 0; i < points.size(); ++i) ++sizes[find(i)];
    OrbitReport r;
    r.group_order = g.order();
    r.acted_on = points.size();
    for (auto& [root, n] : sizes) r.lengths.push_back(n);
    std::sort(r.lengths.begin(), r.lengths.end());
    return r;
}

}  // namespace detail

/// Orbits of G on the cyclic subgroups of order m of (Z/m)^2.
inline OrbitReport cyclic_subgroup_orbits(const MatrixGroup& g) {
    const std::uint32_t m = g.modulus();
    return detail::orbits_of(g, cyclic_subgroup_reps(m), [m](const Vec2& v) { return canonical_cyclic(v, m); });
}

/// Orbits of G on the vectors of additive order m.
inline OrbitReport point_orbits(const MatrixGroup& g) {
    const std::uint32_t m = g.modulus();
    std::vector<Vec2> pts;
    for (std::uint32_t x = 0; x < m; ++x)
        for (std::uint32_t y = 0; y < m; ++y)
            if (has_full_order({x, y}, m)) pts.push_back({x, y});
    return detail::orbits_of(g, pts, [](const Vec2& v) { return v; });
}

struct Fingerprint {
    std::size_t order = 0;
    std::map<std::uint64_t, std::size_t> order_histogram;
    std::size_t scalar_order = 0;
    std::vector<std::size_t> orbit_signature;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
    friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

inline Fingerprint fingerprint(const MatrixGroup& g) {
    Fingerprint f;
    f.order = g.order();
    const std::uint64_t n = g.order();
    const auto nf = factor_u64(n);
    g.for_each([&](const MatZmod& x) { ++f.order_histogram[element_order(x, n, nf)]; });
    f.scalar_order = scalar_subgroup_order(g);
    f.orbit_signature = cyclic_subgroup_orbits(g).lengths;
    return f;
}

namespace detail {

/// All x in (Z/p^k)^4 with M x = 0 mod p^k, enumerated digit by digit; `keep_mod_p` prunes on the
/// reduction mod p. Calls visit(x) for each solution; stops early when visit returns true.
inline bool solve_homogeneous(const std::array<std::array<std::int64_t, 4>, 4>& M, std::uint32_t p, int k,
                              const std::function<bool(const std::array<std::uint32_t, 4>&)>& keep_mod_p,
                              const std::function<bool(const std::array<std::uint32_t, 4>&)>& visit) {
    // Solve M y = rhs mod p: returns (particular, nullspace basis) or nullopt if inconsistent.
    auto solve_mod_p = [p, &M](const std::array<std::int64_t, 4>& rhs)
        -> std::optional<std::pair<std::array<std::uint32_t, 4>, std::vector<std::array<std::uint32_t, 4>>>> {
        std::array<std::array<std::int64_t, 5>, 4> A{};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) A[i][j] = ((M[i][j] % p) + p) % p;
            A[i][4] = ((rhs[i] % p) + p) % p;
        }
        std::array<int, 4> pivot_col{-1, -1, -1, -1};
        int row = 0;
        for (int col = 0; col < 4 && row < 4; ++col) {
            int sel = -1;
            for (int i = row; i < 4; ++i)
                if (A[i][col] != 0) {
                    sel = i;
                    break;
                }
            if (sel < 0) continue;
            std::swap(A[row], A[sel]);
            std::int64_t inv = modarith::inverse(static_cast<std::uint32_t>(A[row][col]), p);
            for (int j = 0; j < 5; ++j) A[row][j] = A[row][j] * inv % p;
            for (int i = 0; i < 4; ++i) {
                if (i == row || A[i][col] == 0) continue;
                std::int64_t f = A[i][col];
                for (int j = 0; j < 5; ++j) A[i][j] = ((A[i][j] - f * A[row][j]) % p + p) % p;
            }
            pivot_col[row] = col;
            ++row;
        }
        for (int i = row; i < 4; ++i)
            if (A[i][4] != 0) return std::nullopt;
        std::array<bool, 4> is_pivot{};
        std::array<std::uint32_t, 4> part{};
        for (int i = 0; i < row; ++i) {
            is_pivot[pivot_col[i]] = true;
            part[pivot_col[i]] = static_cast<std::uint32_t>(A[i][4]);
        }
        std::vector<std::array<std::uint32_t, 4>> basis;
        for (int f = 0; f < 4; ++f) {
            if (is_pivot[f]) continue;
            std::array<std::uint32_t, 4> v{};
            v[f] = 1;
            for (int i = 0; i < row; ++i) v[pivot_col[i]] = static_cast<std::uint32_t>((p - A[i][f]) % p);
            basis.push_back(v);
        }
        return std::make_pair(part, basis);
    };

    std::function<bool(std::array<std::uint32_t, 4>, int, std::uint64_t)> descend =
        [&](std::array<std::uint32_t, 4> x, int level, std::uint64_t pj) -> bool {
        // x is a solution mod pj = p^level.
        if (level == k) return visit(x);
        std::array<std::int64_t, 4> rhs{};
        for (int i = 0; i < 4; ++i) {
            std::int64_t s = 0;
            for (int j = 0; j < 4; ++j) s += M[i][j] * static_cast<std::int64_t>(x[j]);
            std::int64_t modulus = static_cast<std::int64_t>(pj) * p;
            s = ((s % modulus) + modulus) % modulus;
            rhs[i] = -(s / static_cast<std::int64_t>(pj));
        }
        auto sol = solve_mod_p(rhs);
        if (!sol) return false;
        auto& [part, basis] = *sol;
        std::size_t count = 1;
        for (std::size_t i = 0; i < basis.size(); ++i) count *= p;
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::array<std::uint32_t, 4> y = part;
            std::size_t t = idx;
            for (const auto& b : basis) {
                std::uint32_t coef = static_cast<std::uint32_t>(t % p);
                t /= p;
                for (int j = 0; j < 4; ++j) y[j] = (y[j] + coef * b[j]) % p;
            }
            std::array<std::uint32_t, 4> nx = x;
            for (int j = 0; j < 4; ++j) nx[j] = static_cast<std::uint32_t>(x[j] + pj * y[j]);
            if (level == 0 && !keep_mod_p(nx)) continue;
            if (descend(nx, level + 1, pj * p)) return true;
        }
        return false;
    };
    return descend({0, 0, 0, 0}, 0, 1);
}

/// Representatives of the T-conjugacy classes of elements of T with the given trace and determinant.
inline std::vector<MatZmod> class_reps_with(const MatrixGroup& t, std::uint32_t tr, std::uint32_t det) {
    const std::uint32_t m = t.modulus();
    std::vector<std::uint32_t> pool;
    t.for_each([&](const MatZmod& x) {
        if (x.trace() == tr && x.det() == det) pool.push_back(x.code());
    });
    std::vector<MatZmod> conj_gens = t.generators();
    if (conj_gens.empty()) conj_gens = t.elements();
    std::vector<MatZmod> conj_invs;
    for (const auto& g : conj_gens) conj_invs.push_back(g.inverse());
    std::unordered_set<std::uint32_t> seen;
    std::vector<MatZmod> reps;
    for (auto c : pool) {
        if (seen.count(c)) continue;
        reps.push_back(MatZmod::decode(c, m));
        std::vector<std::uint32_t> stack{c};
        seen.insert(c);
        while (!stack.empty()) {
            MatZmod x = MatZmod::decode(stack.back(), m);
            stack.pop_back();
            for (std::size_t i = 0; i < conj_gens.size(); ++i) {
                std::uint32_t y = (conj_gens[i] * x * conj_invs[i]).code();
                if (seen.insert(y).second) stack.push_back(y);
            }
        }
    }
    return reps;
}

inline std::vector<MatZmod> nontrivial_generators(const MatrixGroup& g) {
    std::vector<MatZmod> gens;
    for (const auto& x : g.generators())
        if (!x.is_identity()) gens.push_back(x);
    if (gens.empty() && g.order() > 1) gens = small_generating_set(g);
    return gens;
}

/// Exhaustive scan of GL2(Z/m) in code order, for moduli that are not prime powers.
inline std::optional<MatZmod> conjugate_into_bruteforce(const std::vector<MatZmod>& gens, const MatrixGroup& t) {
    const std::uint32_t m = t.modulus();
    const std::uint64_t space = static_cast<std::uint64_t>(m) * m * m * m;
    if (modarith::gl2_order(m) > kDefaultGroupCap) throw SizeLimitError("conjugacy search ambient group too large");
    for (std::uint64_t c = 0; c < space; ++c) {
        MatZmod g = MatZmod::decode(static_cast<std::uint32_t>(c), m);
        if (!g.invertible()) continue;
        MatZmod gi = g.inverse();
        bool ok = true;
        for (const auto& s : gens)
            if (!t.contains(g * s * gi)) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    return std::nullopt;
}

}  // namespace detail

/// Some g in GL2(Z/m) with g G g^-1 contained in T, or nullopt when none exists.
inline std::optional<MatZmod> conjugate_into(const MatrixGroup& g, const MatrixGroup& t) {
    if (g.modulus() != t.modulus()) throw Error("conjugate_into: modulus mismatch");
    const std::uint32_t m = g.modulus();
    if (g.order() > t.order() || t.order() % g.order() != 0) return std::nullopt;
    auto gens = detail::nontrivial_generators(g);
    if (gens.empty()) return MatZmod::identity(m);
    // Scalar groups are normal in GL2: containment is conjugation-free.
    bool all_scalar = std::all_of(gens.begin(), gens.end(), [](const MatZmod& x) { return x.is_scalar(); });
    if (all_scalar) {
        for (const auto& s : gens)
            if (!t.contains(s)) return std::nullopt;
        return MatZmod::identity(m);
    }
    auto pp = modarith::prime_power(m);
    if (!pp) return detail::conjugate_into_bruteforce(gens, t);
    const auto [p, k] = *pp;

    // Anchor: prefer a generator that is not scalar mod p, since it has the smallest centralizer.
    std::size_t anchor = gens.size();
    for (std::size_t i = 0; i < gens.size() && anchor == gens.size(); ++i)
        if (!gens[i].reduce(p).is_scalar()) anchor = i;
    for (std::size_t i = 0; i < gens.size() && anchor == gens.size(); ++i)
        if (!gens[i].is_scalar()) anchor = i;
    const MatZmod s = gens[anchor];

    std::optional<MatZmod> witness;
    for (const auto& h : detail::class_reps_with(t, s.trace(), s.det())) {
        // g s = h g, linear in the entries (a, b, c, d) of g.
        const std::int64_t s00 = s.a, s01 = s.b, s10 = s.c, s11 = s.d;
        const std::int64_t h00 = h.a, h01 = h.b, h10 = h.c, h11 = h.d;
        std::array<std::array<std::int64_t, 4>, 4> M{{
            {s00 - h00, s10, -h01, 0},
            {s01, s11 - h00, 0, -h01},
            {-h10, 0, s00 - h11, s10},
            {0, -h10, s01, s11 - h11},
        }};
        auto keep = [p](const std::array<std::uint32_t, 4>& x) {
            std::uint64_t det = (static_cast<std::uint64_t>(x[0]) * x[3] + static_cast<std::uint64_t>(p - x[1] % p) * x[2]) % p;
            return det != 0;
        };
        auto visit = [&](const std::array<std::uint32_t, 4>& x) {
            MatZmod cand(m, x[0], x[1], x[2], x[3]);
            MatZmod inv = cand.inverse();
            for (const auto& gen : gens)
                if (!t.contains(cand * gen * inv)) return false;
            witness = cand;
            return true;
        };
        if (detail::solve_homogeneous(M, p, k, keep, visit)) break;
    }
    return witness;
}

/// Some g with g G1 g^-1 = G2, or nullopt.
inline std::optional<MatZmod> is_conjugate(const MatrixGroup& g1, const MatrixGroup& g2) {
    if (g1.modulus() != g2.modulus()) throw Error("is_conjugate: modulus mismatch");
    if (g1.order() != g2.order()) return std::nullopt;
    if (g1 == g2) return MatZmod::identity(g1.modulus());
    if (scalar_subgroup_order(g1) != scalar_subgroup_order(g2)) return std::nullopt;
    if (cyclic_subgroup_orbits(g1).lengths != cyclic_subgroup_orbits(g2).lengths) return std::nullopt;
    return conjugate_into(g1, g2);
}

/// Same as is_conjugate but trusts precomputed fingerprints for the cheap filter.
inline std::optional<MatZmod> is_conjugate(const MatrixGroup& g1, const Fingerprint& f1, const MatrixGroup& g2,
                                           const Fingerprint& f2) {
    if (!(f1 == f2)) return std::nullopt;
    if (g1 == g2) return MatZmod::identity(g1.modulus());
    return conjugate_into(g1, g2);
}

inline MatrixGroup conjugate(const MatrixGroup& g, const MatZmod& x) {
    MatZmod xi = x.inverse();
    std::vector<std::uint32_t> codes;
    codes.reserve(g.order());
    g.for_each([&](const MatZmod& y) { codes.push_back((x * y * xi).code()); });
    std::sort(codes.begin(), codes.end());
    std::vector<MatZmod> gens;
    for (const auto& y : g.generators()) gens.push_back(x * y * xi);
    return MatrixGroup(g.modulus(), std::move(gens), std::move(codes));
}

/// All subgroups of index 2, ordered by their sorted element codes. They are the kernels of the
/// nonzero characters of G / <g^2>, an elementary abelian 2-group.
inline std::vector<MatrixGroup> index_two_subgroups(const MatrixGroup& g) {
    const std::uint32_t m = g.modulus();
    std::set<std::uint32_t> sq;
    g.for_each([&](const MatZmod& x) { sq.insert((x * x).code()); });
    std::vector<MatZmod> square_gens;
    for (auto c : sq) square_gens.push_back(MatZmod::decode(c, m));
    MatrixGroup squares = group_closure(square_gens, m);
    std::vector<MatZmod> s_gens = small_generating_set(squares);
    std::vector<MatZmod> basis;
    MatrixGroup cur = squares;
    for (auto c : g.codes()) {
        if (cur.order() == g.order()) break;
        if (cur.contains_code(c)) continue;
        basis.push_back(MatZmod::decode(c, m));
        std::vector<MatZmod> gens = s_gens;
        gens.insert(gens.end(), basis.begin(), basis.end());
        cur = group_closure(gens, m);
    }
    std::vector<MatrixGroup> out;
    const std::size_t r = basis.size();
    for (std::uint64_t chi = 1; chi < (1ULL << r); ++chi) {
        std::vector<MatZmod> gens = s_gens;
        std::optional<MatZmod> first;
        for (std::size_t i = 0; i < r; ++i) {
            if (!((chi >> i) & 1)) {
                gens.push_back(basis[i]);
            } else if (!first) {
                first = basis[i];
            } else {
                gens.push_back(*first * basis[i]);
            }
        }
        MatrixGroup h = group_closure(gens, m);
        if (h.order() * 2 != g.order()) throw Error("internal: index-2 subgroup has the wrong order");
        out.push_back(std::move(h));
    }
    std::sort(out.begin(), out.end(), [](const MatrixGroup& x, const MatrixGroup& y) { return x.codes() < y.codes(); });
    return out;
}

}  // namespace isogate
