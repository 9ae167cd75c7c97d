#include "isogate/lift.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace isogate;

namespace {

std::uint64_t gaussian_binomial_total(std::uint64_t q, int n) {
    // Sum over k of [n choose k]_q via the product formula.
    std::uint64_t total = 0;
    for (int k = 0; k <= n; ++k) {
        std::uint64_t num = 1, den = 1;
        for (int i = 0; i < k; ++i) {
            std::uint64_t qn = 1, qi = 1;
            for (int e = 0; e < n - i; ++e) qn *= q;
            for (int e = 0; e < i + 1; ++e) qi *= q;
            num *= qn - 1;
            den *= qi - 1;
        }
        total += num / den;
    }
    return total;
}

// Brute-force stability test using every group element, not just generators.
bool stable_under_all(const Subspace& s, const MatrixGroup& g) {
    bool ok = true;
    g.for_each([&](const MatZmod& x) {
        if (!ok) return;
        MatZmod xi = x.inverse();
        for (const auto& v : s.basis)
            if (!s.contains(conjugate_kvec(x, xi, v))) ok = false;
    });
    return ok;
}

std::multiset<std::size_t> orders_of(const LiftResult& r) {
    std::multiset<std::size_t> o;
    for (const auto& c : r.classes) o.insert(c.order);
    return o;
}

MatrixGroup preimage(const MatrixGroup& g, std::uint32_t p) {
    std::vector<MatZmod> gens;
    for (const auto& x : g.generators()) gens.push_back(MatZmod(p * p, x.a, x.b, x.c, x.d));
    for (int i = 0; i < 4; ++i) {
        KVec v{0, 0, 0, 0};
        v[static_cast<std::size_t>(i)] = 1;
        gens.push_back(kernel_element(p, v));
    }
    return group_closure(gens, p * p);
}

// The unique (up to conjugacy) index-2 subgroup of N_s(5) with surjective determinant outside the Cartan.
MatrixGroup derived_g3_mod5() {
    auto ns = standard_group("split_cartan_normalizer", 5);
    auto cs = standard_group("split_cartan", 5);
    std::vector<MatrixGroup> found;
    for (const auto& h : brute_force_subgroups(ns).classes) {
        if (h.order() * 2 != ns.order() || h.subset_of(cs)) continue;
        std::set<std::uint32_t> dets;
        h.for_each([&](const MatZmod& x) { dets.insert(x.det()); });
        if (dets.size() == 4) found.push_back(h);
    }
    EXPECT_EQ(found.size(), 1u);
    return found.at(0);
}

void check_lift_invariants(const LiftResult& r, const MatrixGroup& g, std::uint32_t p) {
    const std::size_t psi = p * p + p;
    for (const auto& c : r.classes) {
        EXPECT_EQ(reduce_mod(c.representative, p), g);
        EXPECT_EQ(kernel_dimension(c.representative, p), c.kernel_dim);
        EXPECT_EQ(std::accumulate(c.orbits.lengths.begin(), c.orbits.lengths.end(), std::size_t{0}), psi);
        for (auto l : c.orbits.lengths) EXPECT_EQ(c.order % l, 0u);
        EXPECT_NE(c.outcome, LiftOutcome::Unclassified);
    }
    EXPECT_EQ(r.count(LiftOutcome::ScalarFail) + r.count(LiftOutcome::ConjugateIntoSplitNormalizer) + r.count(LiftOutcome::OrbitBound),
              r.classes.size());
    for (std::size_t i = 0; i < r.classes.size(); ++i)
        for (std::size_t j = i + 1; j < r.classes.size(); ++j) {
            if (r.classes[i].order != r.classes[j].order) continue;
            EXPECT_FALSE(is_conjugate(r.classes[i].representative, r.classes[j].representative)) << i << " " << j;
        }
}

}  // namespace

TEST(StableSubspaces, SubspaceCountsMatchGaussianBinomials) {
    EXPECT_EQ(all_subspaces(3).size(), 212u);
    EXPECT_EQ(all_subspaces(3).size(), gaussian_binomial_total(3, 4));
    EXPECT_EQ(all_subspaces(7).size(), gaussian_binomial_total(7, 4));
    EXPECT_EQ(stable_subspaces(group_closure({}, 3), 3).size(), 212u);
}

TEST(StableSubspaces, FullGroupHasTheStandardFour) {
    auto st = stable_subspaces(standard_group("full", 7), 7);
    auto has = [&](std::vector<KVec> basis) {
        Subspace s;
        s.p = 7;
        s.basis = basis;
        return std::any_of(st.begin(), st.end(), [&](const Subspace& x) { return x.basis == basis; });
    };
    EXPECT_TRUE(has({}));
    EXPECT_TRUE(has({{1, 0, 0, 1}}));
    EXPECT_TRUE(has({{1, 0, 0, 6}, {0, 1, 0, 0}, {0, 0, 1, 0}}));
    EXPECT_TRUE(has({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    for (const auto& s : st) EXPECT_TRUE(stable_under_all(s, standard_group("full", 7)));
}

TEST(StableSubspaces, AgreesWithElementwiseOracle) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 6; ++t) {
        MatZmod x(3, rng() % 3, rng() % 3, rng() % 3, rng() % 3);
        if (!x.invertible()) continue;
        auto g = group_closure({x}, 3);
        auto st = stable_subspaces(g, 3);
        std::size_t oracle = 0;
        for (const auto& s : all_subspaces(3)) oracle += stable_under_all(s, g);
        EXPECT_EQ(st.size(), oracle);
    }
}

TEST(LiftSubgroups, SevenSplitNormalizer) {
    auto g = standard_group("split_cartan_normalizer", 7);
    auto r = lift_subgroups(g, 7);
    ASSERT_EQ(r.classes.size(), 8u);
    EXPECT_EQ(orders_of(r), (std::multiset<std::size_t>{72, 504, 504, 3528, 3528, 24696, 24696, 172872}));
    EXPECT_EQ(r.count(LiftOutcome::ScalarFail), 4u);
    EXPECT_EQ(r.count(LiftOutcome::ConjugateIntoSplitNormalizer), 2u);
    EXPECT_EQ(r.count(LiftOutcome::OrbitBound), 2u);
    for (const auto& c : r.classes) {
        if (c.outcome == LiftOutcome::OrbitBound) EXPECT_EQ(c.orbits.lengths, (std::vector<std::size_t>{14, 42}));
        if (c.order == 72) EXPECT_EQ(c.scalars_one_mod_p, 1u);
    }
    const LiftClass* h3 = nullptr;
    const LiftClass* h5 = nullptr;
    for (const auto& c : r.classes) {
        if (c.order == 504 && !h3) h3 = &c;
        if (c.order == 3528 && c.outcome == LiftOutcome::ConjugateIntoSplitNormalizer) h5 = &c;
    }
    ASSERT_TRUE(h3 && h5);
    EXPECT_FALSE(is_conjugate(h3->representative, h5->representative));
    auto ns49 = standard_group("split_cartan_normalizer", 49);
    auto w = conjugate_into(h5->representative, ns49);
    ASSERT_TRUE(w);
    EXPECT_EQ(conjugate(h5->representative, *w), ns49);
    check_lift_invariants(r, g, 7);
}

TEST(LiftSubgroups, ThreeSplitNormalizerAgainstBruteForce) {
    auto g = standard_group("split_cartan_normalizer", 3);
    auto r = lift_subgroups(g, 3);
    ASSERT_EQ(r.classes.size(), 12u);
    std::size_t all_six = 0, into = 0;
    for (const auto& c : r.classes) {
        bool six = std::all_of(c.orbits.lengths.begin(), c.orbits.lengths.end(), [](std::size_t l) { return l == 6; });
        all_six += six;
        into += c.split_normalizer_witness.has_value();
        EXPECT_FALSE(six && c.split_normalizer_witness.has_value());
    }
    EXPECT_EQ(all_six, 8u);
    EXPECT_EQ(into, 4u);
    check_lift_invariants(r, g, 3);

    auto pre = preimage(g, 3);
    ASSERT_EQ(pre.order(), 648u);
    auto lattice = brute_force_subgroups(pre);
    std::multiset<std::size_t> oracle;
    for (const auto& h : lattice.classes)
        if (reduce_mod(h, 3) == g) oracle.insert(h.order());
    EXPECT_EQ(oracle, orders_of(r));
}

TEST(LiftSubgroups, TrivialTargetMod3) {
    auto triv = group_closure({}, 3);
    auto r = lift_subgroups(triv, 3);
    EXPECT_EQ(r.stable_subspace_count, 212u);
    EXPECT_EQ(r.raw_lifts, 212u);
    // Oracle: GL2(F3)-orbits on subspaces of M2(F3) under conjugation.
    auto gl = standard_group("full", 3);
    auto subs = all_subspaces(3);
    std::vector<bool> done(subs.size(), false);
    std::size_t orbits = 0;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (done[i]) continue;
        ++orbits;
        gl.for_each([&](const MatZmod& x) {
            MatZmod xi = x.inverse();
            for (std::size_t j = 0; j < subs.size(); ++j) {
                if (done[j] || subs[j].dim() != subs[i].dim()) continue;
                bool inside = true;
                for (const auto& v : subs[i].basis) inside = inside && subs[j].contains(conjugate_kvec(x, xi, v));
                if (inside) done[j] = true;
            }
        });
    }
    EXPECT_EQ(r.classes.size(), orbits);
}

TEST(LiftSubgroups, FiveSplitNormalizerAndG3) {
    auto ns = standard_group("split_cartan_normalizer", 5);
    auto g3 = derived_g3_mod5();
    for (const auto* g : {&ns, &g3}) {
        auto r = lift_subgroups(*g, 5);
        check_lift_invariants(r, *g, 5);
        EXPECT_GT(r.count(LiftOutcome::OrbitBound), 0u);
        for (const auto& c : r.classes)
            if (c.outcome == LiftOutcome::OrbitBound) EXPECT_EQ(c.orbits.lengths, (std::vector<std::size_t>{10, 20}));
    }
}

TEST(LiftSubgroups, TupleMethodAgreesWithComplementMethod) {
    auto ns3 = standard_group("split_cartan_normalizer", 3);
    auto ns5 = standard_group("split_cartan_normalizer", 5);
    auto g3 = derived_g3_mod5();
    struct Case {
        const MatrixGroup* g;
        std::uint32_t p;
    };
    for (auto [g, p] : {Case{&ns3, 3}, Case{&ns5, 5}, Case{&g3, 5}}) {
        auto a = lift_subgroups(*g, p, LiftMethod::Complement);
        auto b = lift_subgroups(*g, p, LiftMethod::Tuples);
        EXPECT_EQ(a.classes.size(), b.classes.size());
        EXPECT_EQ(orders_of(a), orders_of(b));
        for (std::size_t i = 0; i < a.classes.size() && i < b.classes.size(); ++i)
            EXPECT_TRUE(is_conjugate(a.classes[i].representative, b.classes[i].representative) ||
                        a.classes[i].order != b.classes[i].order);
    }
}

TEST(BruteForceSubgroups, Examples) {
    auto c4 = group_closure({MatZmod::diagonal(5, 2, 1)}, 5);
    ASSERT_EQ(c4.order(), 4u);
    EXPECT_EQ(brute_force_subgroups(c4).all.size(), 3u);
    EXPECT_EQ(brute_force_subgroups(group_closure({}, 7)).all.size(), 1u);
    EXPECT_THROW(brute_force_subgroups(standard_group("full", 7), 1000), SizeLimitError);
}

TEST(LiftSubgroups, IntoCountIncludesOnto) {
    auto g = standard_group("split_cartan_normalizer", 3);
    auto into = lift_subgroups_into(g, 3);
    EXPECT_GE(into.total_classes, 12u);
    bool saw_full = false;
    for (const auto& [h, r] : into.per_subgroup)
        if (h.order() == g.order()) {
            saw_full = true;
            EXPECT_EQ(r.classes.size(), 12u);
        }
    EXPECT_TRUE(saw_full);
}

TEST(LiftSubgroups, OrbitInvariantsOnRandomSubgroupsMod9And25) {
    std::mt19937_64 rng(101);
    for (std::uint32_t m : {9u, 25u}) {
        for (int t = 0; t < 50; ++t) {
            std::vector<MatZmod> gens;
            for (int i = 0; i < 1 + t % 2; ++i) {
                MatZmod x;
                do x = MatZmod(m, rng() % m, rng() % m, rng() % m, rng() % m);
                while (!x.invertible());
                gens.push_back(x);
            }
            auto g = group_closure(gens, m);
            auto lines = cyclic_subgroup_orbits(g);
            auto pts = point_orbits(g);
            EXPECT_EQ(std::accumulate(lines.lengths.begin(), lines.lengths.end(), std::size_t{0}), modarith::psi(m));
            EXPECT_EQ(std::accumulate(pts.lengths.begin(), pts.lengths.end(), std::size_t{0}), pts.acted_on);
            for (auto l : lines.lengths) EXPECT_EQ(g.order() % l, 0u);
            for (auto l : pts.lengths) EXPECT_EQ(g.order() % l, 0u);
        }
    }
}
