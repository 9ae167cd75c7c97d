#pragma once

// Subgroups of GL2(Z/p^2) whose reduction mod p is a prescribed group G, up to
// GL2(Z/p^2)-conjugacy, and the three-way classification of each lift.

#include "isogate/gl2.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace isogate {

/// Coordinates (a, b, c, d) of A in M2(F_p), standing for the kernel element I + pA.
using KVec = std::array<std::uint32_t, 4>;

/// A subspace of V = M2(F_p) in reduced row echelon form.
struct Subspace {
    std::uint32_t p = 2;
    std::vector<KVec> basis;       // RREF rows
    std::vector<int> pivots;       // pivot column of each row

    int dim() const { return static_cast<int>(basis.size()); }

    /// Reduces v against the basis; the result is zero iff v lies in the subspace.
    KVec reduce(KVec v) const {
        for (std::size_t i = 0; i < basis.size(); ++i) {
            std::uint32_t f = v[static_cast<std::size_t>(pivots[i])];
            if (f == 0) continue;
            for (int j = 0; j < 4; ++j) v[static_cast<std::size_t>(j)] = (v[static_cast<std::size_t>(j)] + (p - f) * basis[i][static_cast<std::size_t>(j)]) % p;
        }
        return v;
    }
    bool contains(const KVec& v) const {
        KVec r = reduce(v);
        return r == KVec{0, 0, 0, 0};
    }

    friend bool operator==(const Subspace& x, const Subspace& y) { return x.p == y.p && x.basis == y.basis; }
    friend bool operator<(const Subspace& x, const Subspace& y) {
        if (x.dim() != y.dim()) return x.dim() < y.dim();
        return x.basis < y.basis;
    }

    std::string to_string() const {
        std::string s = "<";
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (i) s += ", ";
            s += "[[" + std::to_string(basis[i][0]) + "," + std::to_string(basis[i][1]) + "],[" + std::to_string(basis[i][2]) + "," +
                 std::to_string(basis[i][3]) + "]]";
        }
        return s + ">";
    }
};

/// Every subspace of F_p^4, ordered by dimension and then by RREF basis.
inline std::vector<Subspace> all_subspaces(std::uint32_t p) {
    std::vector<Subspace> out;
    for (int k = 0; k <= 4; ++k) {
        for (int mask = 0; mask < 16; ++mask) {
            if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
            std::vector<int> piv;
            for (int j = 0; j < 4; ++j)
                if (mask & (1 << j)) piv.push_back(j);
            // Free positions: (row i, column j) with j > piv[i] and j not a pivot.
            std::vector<std::pair<int, int>> free;
            for (int i = 0; i < k; ++i)
                for (int j = piv[static_cast<std::size_t>(i)] + 1; j < 4; ++j)
                    if (!(mask & (1 << j))) free.emplace_back(i, j);
            std::size_t count = 1;
            for (std::size_t f = 0; f < free.size(); ++f) count *= p;
            for (std::size_t idx = 0; idx < count; ++idx) {
                Subspace s;
                s.p = p;
                s.pivots = piv;
                s.basis.assign(static_cast<std::size_t>(k), KVec{0, 0, 0, 0});
                for (int i = 0; i < k; ++i) s.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(piv[static_cast<std::size_t>(i)])] = 1;
                std::size_t t = idx;
                for (auto [i, j] : free) {
                    s.basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(t % p);
                    t /= p;
                }
                out.push_back(std::move(s));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// A -> g A g^-1 on M2(F_p).
inline KVec conjugate_kvec(const MatZmod& g, const MatZmod& ginv, const KVec& v) {
    MatZmod a(g.m, v[0], v[1], v[2], v[3]);
    MatZmod r = g * a * ginv;
    return {r.a, r.b, r.c, r.d};
}

/// Subspaces of V invariant under conjugation by G (a group mod p).
inline std::vector<Subspace> stable_subspaces(const MatrixGroup& g, std::uint32_t p) {
    if (g.modulus() != p || !is_prime_u64(p)) throw Error("stable_subspaces expects a group mod the prime p");
    std::vector<std::pair<MatZmod, MatZmod>> gens;
    for (const auto& x : g.generators()) gens.emplace_back(x, x.inverse());
    if (gens.empty() && g.order() > 1)
        for (const auto& x : small_generating_set(g)) gens.emplace_back(x, x.inverse());
    std::vector<Subspace> out;
    for (auto& s : all_subspaces(p)) {
        bool stable = true;
        for (const auto& [x, xi] : gens) {
            for (const auto& v : s.basis)
                if (!s.contains(conjugate_kvec(x, xi, v))) {
                    stable = false;
                    break;
                }
            if (!stable) break;
        }
        if (stable) out.push_back(std::move(s));
    }
    return out;
}

inline MatZmod kernel_element(std::uint32_t p, const KVec& v) {
    std::uint32_t m = p * p;
    return MatZmod(m, 1 + p * v[0], p * v[1], p * v[2], 1 + p * v[3]);
}

/// dim over F_p of H intersected with the kernel of reduction mod p.
inline int kernel_dimension(const MatrixGroup& h, std::uint32_t p) {
    std::size_t n = 0;
    h.for_each([&](const MatZmod& x) {
        if (x.reduce(p).is_identity()) ++n;
    });
    int d = 0;
    while (n > 1) {
        if (n % p != 0) throw Error("kernel intersection order is not a power of p");
        n /= p;
        ++d;
    }
    return d;
}

enum class LiftOutcome { ScalarFail, ConjugateIntoSplitNormalizer, OrbitBound, Unclassified };

inline std::string to_string(LiftOutcome o) {
    switch (o) {
        case LiftOutcome::ScalarFail: return "ScalarFail";
        case LiftOutcome::ConjugateIntoSplitNormalizer: return "ConjugateIntoSplitNormalizer";
        case LiftOutcome::OrbitBound: return "OrbitBound";
        case LiftOutcome::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

struct LiftClass {
    MatrixGroup representative;
    Subspace kernel;                         // H intersected with V
    std::size_t order = 0;
    int kernel_dim = 0;
    Fingerprint fingerprint;
    // Classification data, computed for every class regardless of where the ladder stops.
    std::size_t scalars_one_mod_p = 0;
    std::optional<MatZmod> split_normalizer_witness;
    OrbitReport orbits;
    LiftOutcome outcome = LiftOutcome::Unclassified;
};

struct LiftResult {
    std::uint32_t p = 0;
    std::size_t stable_subspace_count = 0;
    std::size_t raw_lifts = 0;  // lifts found before conjugacy deduplication
    std::vector<LiftClass> classes;

    std::size_t count(LiftOutcome o) const {
        return static_cast<std::size_t>(std::count_if(classes.begin(), classes.end(), [o](const LiftClass& c) { return c.outcome == o; }));
    }
};

enum class LiftMethod { Auto, Complement, Tuples };

namespace detail {

inline std::vector<MatZmod> nontrivial_gens_of(const MatrixGroup& g) {
    std::vector<MatZmod> gens;
    for (const auto& x : g.generators())
        if (!x.is_identity()) gens.push_back(x);
    if (gens.empty() && g.order() > 1) gens = small_generating_set(g);
    return gens;
}

inline MatZmod naive_lift(const MatZmod& g, std::uint32_t m) { return MatZmod(m, g.a, g.b, g.c, g.d); }

/// Generators of a subgroup C of GL2(Z/p^2) mapping isomorphically onto G; requires p not dividing |G|.
inline std::vector<MatZmod> coprime_complement(const MatrixGroup& g, std::uint32_t p) {
    const std::uint32_t m = p * p;
    auto gens = nontrivial_gens_of(g);
    std::vector<MatZmod> out;
    std::vector<MatZmod> below;  // generators mod p used so far
    for (const auto& x : gens) {
        std::uint64_t n = element_order(x);
        std::uint64_t u = 1;
        while ((p * u) % n != 1 % n) ++u;
        MatZmod t = naive_lift(x, m).pow(p * u);
        below.push_back(x);
        std::size_t target = group_closure(below, p).order();
        if (out.empty()) {
            out.push_back(t);
            continue;
        }
        // Lifts of x of order n are V-conjugate, so some conjugate of t extends the complement built so far.
        bool found = false;
        for (std::uint32_t code = 0; code < p * p * p * p && !found; ++code) {
            KVec v{code % p, (code / p) % p, (code / (p * p)) % p, code / (p * p * p)};
            MatZmod k = kernel_element(p, v);
            MatZmod cand = k * t * k.inverse();
            auto trial = out;
            trial.push_back(cand);
            auto h = bounded_closure(trial, m, target);
            if (h && h->order() == target) {
                out = std::move(trial);
                found = true;
            }
        }
        if (!found) throw Error("no complement found; group order may not be prime to p");
    }
    return out;
}

}  // namespace detail

/// Runs the classification ladder on a lift, filling in every classification field.
inline void classify_lift(LiftClass& c, std::uint32_t p, const MatrixGroup& split_normalizer_p2) {
    c.scalars_one_mod_p = scalar_count(c.representative, p);
    c.split_normalizer_witness = conjugate_into(c.representative, split_normalizer_p2);
    c.orbits = cyclic_subgroup_orbits(c.representative);
    if (c.scalars_one_mod_p < p)
        c.outcome = LiftOutcome::ScalarFail;
    else if (c.split_normalizer_witness)
        c.outcome = LiftOutcome::ConjugateIntoSplitNormalizer;
    else
        c.outcome = LiftOutcome::OrbitBound;
}

/// Subgroups H of GL2(Z/p^2) with reduce_mod(H, p) = G, one per GL2(Z/p^2)-conjugacy class.
inline LiftResult lift_subgroups(const MatrixGroup& g, std::uint32_t p, LiftMethod method = LiftMethod::Auto,
                                 std::size_t tuple_cap = 20'000'000) {
    if (p != 3 && p != 5 && p != 7) throw UnsupportedGroup("lift_subgroups supports p in {3, 5, 7}");
    if (g.modulus() != p) throw Error("lift_subgroups: target group must be given mod p");
    const std::uint32_t m = p * p;
    const bool coprime = g.order() % p != 0;
    if (method == LiftMethod::Auto) method = coprime ? LiftMethod::Complement : LiftMethod::Tuples;
    if (method == LiftMethod::Complement && !coprime) throw UnsupportedGroup("complement method needs |G| prime to p");

    LiftResult result;
    result.p = p;
    auto stable = stable_subspaces(g, p);
    auto gens = detail::nontrivial_gens_of(g);

    struct Candidate {
        MatrixGroup h;
        Subspace k;
    };
    std::vector<Candidate> candidates;
    std::size_t budget = tuple_cap;
    std::vector<MatZmod> complement;
    if (method == LiftMethod::Complement) complement = detail::coprime_complement(g, p);

    for (const auto& k : stable) {
        std::vector<MatZmod> kgens;
        for (const auto& v : k.basis) kgens.push_back(kernel_element(p, v));
        std::size_t expect = g.order();
        for (int i = 0; i < k.dim(); ++i) expect *= p;

        if (method == LiftMethod::Complement) {
            auto hg = complement;
            hg.insert(hg.end(), kgens.begin(), kgens.end());
            auto h = group_closure(hg, m);
            if (h.order() != expect) throw Error("complement lift has unexpected order");
            candidates.push_back({h, k});
            continue;
        }

        // Tuple method: lift each generator by every coset of V/K, pruning on x^ord(g) in K.
        std::vector<int> free_cols;
        for (int j = 0; j < 4; ++j)
            if (std::find(k.pivots.begin(), k.pivots.end(), j) == k.pivots.end()) free_cols.push_back(j);
        std::size_t cosets = 1;
        for (std::size_t i = 0; i < free_cols.size(); ++i) cosets *= p;
        std::vector<std::vector<MatZmod>> options(gens.size());
        for (std::size_t i = 0; i < gens.size(); ++i) {
            std::uint64_t n = element_order(gens[i]);
            MatZmod base = detail::naive_lift(gens[i], m);
            for (std::size_t idx = 0; idx < cosets; ++idx) {
                KVec v{0, 0, 0, 0};
                std::size_t t = idx;
                for (int c : free_cols) {
                    v[static_cast<std::size_t>(c)] = static_cast<std::uint32_t>(t % p);
                    t /= p;
                }
                MatZmod x = base * kernel_element(p, v);
                MatZmod pw = x.pow(n);
                KVec w{(pw.a + m - 1) % m / p, pw.b / p, pw.c / p, (pw.d + m - 1) % m / p};
                if (k.contains(w)) options[i].push_back(x);
            }
        }
        std::set<std::vector<std::uint32_t>> seen;
        std::vector<std::size_t> idx(gens.size(), 0);
        bool any_empty = std::any_of(options.begin(), options.end(), [](const auto& o) { return o.empty(); });
        if (any_empty) continue;
        while (true) {
            if (budget-- == 0) throw SizeLimitError("lift tuple enumeration exceeded its cap");
            std::vector<MatZmod> hg = kgens;
            for (std::size_t i = 0; i < gens.size(); ++i) hg.push_back(options[i][idx[i]]);
            auto h = bounded_closure(hg, m, expect);
            if (h && h->order() == expect && seen.insert(h->codes()).second) {
                candidates.push_back({*h, k});
            }
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == options[i].size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
    }

    result.stable_subspace_count = stable.size();
    result.raw_lifts = candidates.size();

    // Deduplicate up to conjugacy: fingerprint first, witness search within equal fingerprints.
    auto ns = standard_group(StandardGroup::SplitCartanNormalizer, m);
    for (auto& cand : candidates) {
        if (!(reduce_mod(cand.h, p) == g)) throw Error("lift does not reduce onto the target group");
        Fingerprint f = fingerprint(cand.h);
        int kd = cand.k.dim();
        bool dup = false;
        for (const auto& c : result.classes) {
            if (c.kernel_dim != kd || !(c.fingerprint == f)) continue;
            if (is_conjugate(c.representative, c.fingerprint, cand.h, f)) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        LiftClass lc;
        lc.representative = cand.h;
        lc.kernel = cand.k;
        lc.order = cand.h.order();
        lc.kernel_dim = kd;
        lc.fingerprint = std::move(f);
        classify_lift(lc, p, ns);
        result.classes.push_back(std::move(lc));
    }
    std::stable_sort(result.classes.begin(), result.classes.end(), [](const LiftClass& a, const LiftClass& b) {
        if (a.order != b.order) return a.order < b.order;
        return a.kernel < b.kernel;
    });
    return result;
}

/// Every subgroup of A, one representative per GL2-conjugacy class, by closing cyclic subgroups under joins.
struct SubgroupLattice {
    std::vector<MatrixGroup> all;      // every subgroup, before conjugacy deduplication
    std::vector<MatrixGroup> classes;  // one per GL2-conjugacy class
};

inline SubgroupLattice brute_force_subgroups(const MatrixGroup& a, std::size_t cap = 5000) {
    if (a.order() > cap) throw SizeLimitError("brute_force_subgroups: group order exceeds " + std::to_string(cap));
    const std::uint32_t m = a.modulus();
    const std::size_t n = a.order();
    const auto& codes = a.codes();
    auto index_of = [&](std::uint32_t c) {
        return static_cast<std::size_t>(std::lower_bound(codes.begin(), codes.end(), c) - codes.begin());
    };
    std::vector<MatZmod> el = a.elements();
    std::vector<std::uint16_t> table(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) table[i * n + j] = static_cast<std::uint16_t>(index_of((el[i] * el[j]).code()));
    const std::size_t words = (n + 63) / 64;
    using Bits = std::vector<std::uint64_t>;
    auto has = [](const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1ULL; };
    auto closure = [&](const std::vector<std::size_t>& gens) {
        Bits bits(words, 0);
        std::vector<std::size_t> queue{index_of(MatZmod::identity(m).code())};
        bits[queue[0] / 64] |= 1ULL << (queue[0] % 64);
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (auto s : gens) {
                std::size_t y = table[queue[h] * n + s];
                if (!has(bits, y)) {
                    bits[y / 64] |= 1ULL << (y % 64);
                    queue.push_back(y);
                }
            }
        return bits;
    };
    struct Node {
        Bits bits;
        std::vector<std::size_t> gens;
    };
    std::map<Bits, std::size_t> known;
    std::vector<Node> nodes;
    // Cyclic subgroups.
    std::vector<std::pair<Bits, std::size_t>> cyclic;
    {
        std::set<Bits> seen;
        for (std::size_t i = 0; i < n; ++i) {
            Bits b = closure({i});
            if (seen.insert(b).second) cyclic.emplace_back(b, i);
        }
    }
    auto add = [&](Bits b, std::vector<std::size_t> gens) {
        if (known.count(b)) return;
        known.emplace(b, nodes.size());
        nodes.push_back({std::move(b), std::move(gens)});
    };
    for (auto& [b, g] : cyclic) add(b, {g});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (auto& [cb, cg] : cyclic) {
            if (has(nodes[i].bits, cg)) continue;
            auto gens = nodes[i].gens;
            gens.push_back(cg);
            Bits j = closure(gens);
            add(std::move(j), std::move(gens));
        }
    }
    SubgroupLattice out;
    for (auto& node : nodes) {
        std::vector<std::uint32_t> cs;
        std::vector<MatZmod> gens;
        for (std::size_t i = 0; i < n; ++i)
            if (has(node.bits, i)) cs.push_back(codes[i]);
        for (auto g : node.gens)
            if (!el[g].is_identity()) gens.push_back(el[g]);
        out.all.emplace_back(m, std::move(gens), std::move(cs));
    }
    std::sort(out.all.begin(), out.all.end(), [](const MatrixGroup& x, const MatrixGroup& y) {
        if (x.order() != y.order()) return x.order() < y.order();
        return x.codes() < y.codes();
    });
    std::vector<Fingerprint> fps;
    for (const auto& h : out.all) {
        Fingerprint f = fingerprint(h);
        bool dup = false;
        for (std::size_t i = 0; i < out.classes.size() && !dup; ++i)
            if (fps[i] == f && is_conjugate(out.classes[i], fps[i], h, f)) dup = true;
        if (!dup) {
            out.classes.push_back(h);
            fps.push_back(std::move(f));
        }
    }
    return out;
}

/// Lifts of every subgroup of G (up to GL2(F_p)-conjugacy), i.e. subgroups of GL2(Z/p^2) reducing into G.
struct IntoLiftResult {
    std::size_t subgroup_classes = 0;
    std::size_t total_classes = 0;
    std::vector<std::pair<MatrixGroup, LiftResult>> per_subgroup;
};

inline IntoLiftResult lift_subgroups_into(const MatrixGroup& g, std::uint32_t p) {
    IntoLiftResult out;
    auto lattice = brute_force_subgroups(g);
    out.subgroup_classes = lattice.classes.size();
    for (const auto& h : lattice.classes) {
        auto r = lift_subgroups(h, p);
        out.total_classes += r.classes.size();
        out.per_subgroup.emplace_back(h, std::move(r));
    }
    return out;
}

}  // namespace isogate
