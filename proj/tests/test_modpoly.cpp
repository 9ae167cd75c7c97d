#include "isogate/jmatch.hpp"
#include "isogate/modgen.hpp"
#include "isogate/modpoly.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace isogate;

namespace {

const std::string kPhi2 = std::string(ISOGATE_DATA_DIR) + "/phi2.txt";

Rational R(long n, long d = 1) { return make_rational(n, d); }

ModularPolynomial parse(const std::string& text, int level) {
    std::istringstream in(text);
    return parse_modpoly(in, level, "test");
}

// Phi(j(q), j(q^N)) as a Laurent series must vanish; checks the coefficients of q^{-D N} .. q^{extra}.
bool vanishes_on_q_expansion(const ModularPolynomial& phi, std::size_t extra) {
    const std::size_t N = static_cast<std::size_t>(phi.level());
    const std::size_t D = static_cast<std::size_t>(phi.degree());
    const std::size_t top = D * N;  // largest pole order
    const std::size_t M = top + extra;
    auto js = modgen::j_series(M);
    modgen::Series jn(M);
    for (std::size_t k = 0; k * N < M; ++k) jn[k * N] = js[k];
    std::vector<modgen::Series> pa{modgen::Series{1}}, pb{modgen::Series{1}};
    for (std::size_t k = 1; k <= D; ++k) {
        pa.push_back(modgen::mul(pa.back(), js, M));
        pb.push_back(modgen::mul(pb.back(), jn, M));
    }
    modgen::Series total(M);
    for (std::size_t a = 0; a <= D; ++a)
        for (std::size_t b = 0; b <= D; ++b) {
            Integer c = phi.coeff(static_cast<int>(a), static_cast<int>(b));
            if (c == 0) continue;
            auto s = modgen::mul(pa[a], pb[b], M);
            std::size_t shift = top - a - N * b;
            for (std::size_t i = 0; i + shift < M; ++i) total[i + shift] += c * s[i];
        }
    for (const auto& x : total)
        if (x != 0) return false;
    return true;
}

}  // namespace

TEST(LoadModpoly, Phi2Fixture) {
    auto phi = load_modpoly(kPhi2, 2);
    EXPECT_EQ(phi.level(), 2);
    EXPECT_EQ(phi.degree(), 3);
    EXPECT_EQ(phi.coeff(3, 0), 1);
    EXPECT_EQ(phi.coeff(0, 3), 1);
    EXPECT_EQ(phi.coeff(2, 2), -1);
    EXPECT_EQ(phi.coeff(2, 1), 1488);
    EXPECT_EQ(phi.coeff(1, 2), 1488);
    EXPECT_EQ(phi.coeff(2, 0), -162000);
    EXPECT_EQ(phi.coeff(1, 1), 40773375);
    EXPECT_EQ(phi.coeff(0, 1), Integer("8748000000"));
    EXPECT_EQ(phi.coeff(0, 0), Integer("-157464000000000"));
}

TEST(LoadModpoly, PsiConsistency) {
    EXPECT_EQ(modarith::psi(49), 56u);
    EXPECT_EQ(modarith::psi(2), 3u);
    EXPECT_EQ(modarith::psi(7), 8u);
}

TEST(LoadModpoly, Errors) {
    EXPECT_THROW(parse("", 2), ModpolyFormatError);
    EXPECT_THROW(parse("# only a comment\n\n", 2), ModpolyFormatError);
    try {
        parse("[3,0] 1\n\n[1,2] 5\n", 2);
        FAIL() << "expected a format error";
    } catch (const ModpolyFormatError& e) {
        EXPECT_EQ(e.line, 3u);
    }
    EXPECT_THROW(parse("[3,0] 1\n[2,1 5\n", 2), ModpolyFormatError);
    EXPECT_THROW(parse("[3,0] 1\n[2,1] 5x\n", 2), ModpolyFormatError);
    EXPECT_THROW(parse("[3,0] 1\n[2,1]\n", 2), ModpolyFormatError);
    EXPECT_THROW(parse("[3,0] 1\n[3,0] 1\n", 2), ModpolyFormatError);
    // non-monic
    EXPECT_THROW(parse("[3,0] 2\n[0,0] 1\n", 2), ModpolyIntegrityError);
    // wrong degree for the level
    EXPECT_THROW(parse("[4,0] 1\n[0,0] 1\n", 2), ModpolyIntegrityError);
    EXPECT_THROW(parse("[3,0] 1\n", 3), ModpolyIntegrityError);
    // X^psi must not carry a Y
    EXPECT_THROW(parse("[3,0] 1\n[3,1] 1\n", 2), ModpolyIntegrityError);
    EXPECT_THROW(load_modpoly("/nonexistent/phi.txt", 2), Error);
}

TEST(LoadModpoly, CommentsAndWhitespace) {
    auto phi = parse("# header\n  [3,0]   1  \r\n\n[0,0] -7\n   # indented comment\n", 2);
    EXPECT_EQ(phi.coeff(0, 0), -7);
    EXPECT_EQ(phi.stored_terms(), 2u);
}

TEST(Specialize, Phi2AtZero) {
    auto phi = load_modpoly(kPhi2, 2);
    auto s = specialize(phi, R(0));
    PolyQ expected = PolyQ::from_integers(
        {Integer("-157464000000000"), Integer("8748000000"), Integer(-162000), Integer(1)});
    EXPECT_EQ(s.poly, expected);
    EXPECT_EQ(s.poly, PolyQ({-54000, 1}).pow(3));
}

TEST(Specialize, Phi2At1728HasRoot287496) {
    auto phi = load_modpoly(kPhi2, 2);
    auto s = specialize(phi, R(1728));
    EXPECT_EQ(s.poly(R(287496)), 0);
    EXPECT_EQ(R(287496), rpow(R(66), 3));
}

TEST(Specialize, RationalJClearsDenominators) {
    auto phi = load_modpoly(kPhi2, 2);
    auto s = specialize(phi, R(3, 2));
    EXPECT_EQ(s.poly.degree(), 3);
    for (const auto& c : s.poly.coeffs()) EXPECT_EQ(c.get_den(), 1);
    EXPECT_EQ(s.poly.content(), 1);
}

TEST(Specialize, RoundTripAgainstDoubleSubstitution) {
    auto phi = load_modpoly(kPhi2, 2);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-50, 50), den(1, 9);
    for (int trial = 0; trial < 20; ++trial) {
        Rational j = make_rational(num(rng), den(rng)), jp = make_rational(num(rng), den(rng));
        auto s = specialize(phi, j);
        EXPECT_EQ(s.poly.monic()(jp), phi.eval(jp, j));
        EXPECT_EQ(phi.eval(j, jp), phi.eval(jp, j));
    }
}

TEST(DegreeWitness, Phi2NotSquarefreeAtCMPoints) {
    // Phi_2(X, 0) = (X - 54000)^3 and Phi_2(X, 1728) = (X - 1728)(X - 287496)^2.
    auto phi = load_modpoly(kPhi2, 2);
    auto w0 = isogeny_degree_witness(phi, R(0));
    EXPECT_EQ(w0.status, WitnessStatus::NotSquarefree);
    ASSERT_TRUE(w0.gcd_witness.has_value());
    EXPECT_EQ(*w0.gcd_witness, PolyQ({-54000, 1}).pow(2));
    auto w1 = isogeny_degree_witness(phi, R(1728));
    EXPECT_EQ(w1.status, WitnessStatus::NotSquarefree);
    EXPECT_EQ(*w1.gcd_witness, PolyQ({-287496, 1}));
}

TEST(DegreeWitness, Phi2WithRationalTwoIsogeny) {
    // j = (s+16)^3/s at s = 1 is 2-isogenous to (s+256)^3/s^2 = 257^3.
    auto phi = load_modpoly(kPhi2, 2);
    Rational j = builtin_family("j2iso")(R(1));
    EXPECT_EQ(j, R(4913));
    auto w = isogeny_degree_witness(phi, j);
    ASSERT_EQ(w.status, WitnessStatus::Certified);
    EXPECT_EQ(w.degrees, (DegreeMultiset{1, 2}));
    EXPECT_EQ(w.min_degree, 1);
    EXPECT_EQ(specialize(phi, j).poly(rpow(R(257), 3)), 0);
    EXPECT_GE(w.primes.front(), 11u);
}

TEST(DegreeWitness, Phi2Irreducible) {
    auto phi = load_modpoly(kPhi2, 2);
    auto w = isogeny_degree_witness(phi, R(1));
    ASSERT_EQ(w.status, WitnessStatus::Certified);
    EXPECT_EQ(w.degrees, DegreeMultiset{3});
}

TEST(DegreeWitness, CapExhaustedIsIndeterminate) {
    auto phi = load_modpoly(kPhi2, 2);
    auto z = isogeny_degree_witness(phi, R(4913), 0);
    EXPECT_EQ(z.status, WitnessStatus::Indeterminate);
    EXPECT_TRUE(z.degrees.empty());
    EXPECT_EQ(z.min_degree, 0);
    auto f = isogeny_degree_witness(phi, R(4913), 0, Fallback::Factorize);
    EXPECT_EQ(f.status, WitnessStatus::Certified);
    EXPECT_EQ(f.degrees, (DegreeMultiset{1, 2}));
}

TEST(Generator, Phi2MatchesFixture) {
    auto gen = modgen::classical(2);
    auto fix = load_modpoly(kPhi2, 2);
    EXPECT_EQ(gen.table(), fix.table());
}

TEST(Generator, PrimeLevelsVanishOnQExpansions) {
    for (int l : {3, 5, 7}) EXPECT_TRUE(vanishes_on_q_expansion(modgen::classical(l), 15)) << l;
}

TEST(Generator, Phi7FrickePairs) {
    // j7(h) and j7(49/h) are 7-isogenous.
    auto phi = modgen::classical(7);
    JFamily j7 = builtin_family("j7");
    for (Rational h : {R(1), R(3, 5), R(-2, 7), R(11)}) EXPECT_EQ(phi.eval(j7(h), j7(R(49) / h)), 0);
    EXPECT_NE(phi.eval(R(1728), R(1728)), 0);
}

TEST(Generator, SquareLevelsVanishOnQExpansions) {
    EXPECT_TRUE(vanishes_on_q_expansion(modgen::classical(4), 15));
    EXPECT_TRUE(vanishes_on_q_expansion(modgen::classical(9), 10));
}

TEST(Generator, UnsupportedLevel) {
    EXPECT_THROW(modgen::classical(6), Error);
    EXPECT_THROW(modgen::classical(17), Error);
}

TEST(Generator, ResultantAndInterpolationHelpers) {
    // Res(x^2 - 2, x - 3) = 7 (up to the convention sign: (-1)^{2*1} g(roots) product = (3^2 - 2)).
    EXPECT_EQ(modgen::resultant({-2, 0, 1}, {-3, 1}), 7);
    auto p = modgen::interpolate({R(0), R(1), R(2)}, {R(1), R(2), R(5)});
    EXPECT_EQ(p, PolyQ({1, 0, 1}));
}

TEST(DegreeWitness, Phi49AtSevenAdicExceptionalJ) {
    auto phi = modgen::classical(49);
    EXPECT_EQ(phi.degree(), 56);
    Rational j = parse_rational("2268945/128");

    // Frobenius patterns here only ever look like (1,1,3,3,3,3,21,21), (1,1,2^6,14,14,14), (7^8):
    // they cannot separate {14,21,21} from e.g. {7,49}, so patterns alone stay inconclusive.
    auto patterns_only = isogeny_degree_witness(phi, j, 12);
    EXPECT_EQ(patterns_only.status, WitnessStatus::Indeterminate);
    EXPECT_TRUE(patterns_only.candidates.count(DegreeMultiset{14, 21, 21}));
    EXPECT_TRUE(patterns_only.candidates.count(DegreeMultiset{7, 49}));
    EXPECT_TRUE(patterns_only.degrees.empty());

    auto w = isogeny_degree_witness(phi, j, 12, Fallback::Factorize);
    ASSERT_EQ(w.status, WitnessStatus::Certified);
    EXPECT_EQ(w.method, "factorization");
    // Independently computed with a CAS from Res_Z(Phi_7(X, Z), Phi_7(Z, j)) / (X - j)^8.
    EXPECT_EQ(w.degrees, (DegreeMultiset{14, 21, 21}));
    EXPECT_EQ(w.min_degree, 14);
    for (const auto& m : w.candidates) EXPECT_LE(*std::min_element(m.begin(), m.end()), phi.degree());
    EXPECT_TRUE(w.candidates.count(w.degrees));
}

TEST(DegreeWitness, SpecialisationAgreesWithDirectResultant) {
    // Phi_49(X, j) (X - j)^8 = Res_Z(Phi_7(X, Z), Phi_7(Z, j)), checked at a few integer X.
    auto phi7 = modgen::classical(7);
    auto phi49 = modgen::classical(49);
    Rational j = parse_rational("2268945/128");
    PolyQ spec = specialize(phi49, j).poly.monic();
    auto row = [&](const Rational& v) {
        std::vector<Rational> c(9);
        for (int b = 0; b <= 8; ++b)
            for (int a = 0; a <= 8; ++a) c[static_cast<std::size_t>(b)] += Rational(phi7.coeff(a, b)) * rpow(v, a);
        return PolyQ(std::move(c));
    };
    PolyQ gj = row(j);
    ZCoeffs gz = gj.primitive_integer();
    Rational gscale = gj.content();
    for (long x : {0L, 3L, -5L}) {
        PolyQ fx = row(Rational(x));
        ZCoeffs fz = fx.primitive_integer();
        Rational res = Rational(modgen::resultant(fz, gz)) * rpow(fx.content(), 8) * rpow(gscale, 8);
        EXPECT_EQ(spec(Rational(x)) * rpow(Rational(x) - j, 8), res) << x;
    }
}
