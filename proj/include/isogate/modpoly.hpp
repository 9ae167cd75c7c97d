#pragma once

// Classical modular polynomials from sparse "[i,j] c" files, specialisation at rational j,
// and factor-degree certificates for the specialised polynomial.

#include "isogate/factor.hpp"
#include "isogate/gl2.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace isogate {

class ModpolyFormatError : public ParseError {
public:
    ModpolyFormatError(const std::string& source, std::size_t line, const std::string& why)
        : ParseError(source + ":" + std::to_string(line) + ": " + why), line(line) {}
    std::size_t line;
};

class ModpolyIntegrityError : public Error {
public:
    using Error::Error;
};

class ModularPolynomial {
public:
    using Table = std::map<std::pair<int, int>, Integer>;  // (i, j) with i >= j

    ModularPolynomial(int level, Table table) : level_(level), table_(std::move(table)) { validate(); }

    int level() const { return level_; }
    int degree() const { return static_cast<int>(modarith::psi(static_cast<std::uint64_t>(level_))); }
    const Table& table() const { return table_; }
    std::size_t stored_terms() const { return table_.size(); }

    /// Coefficient of X^i Y^j.
    Integer coeff(int i, int j) const {
        auto it = table_.find(i >= j ? std::make_pair(i, j) : std::make_pair(j, i));
        return it == table_.end() ? Integer(0) : it->second;
    }

    /// Phi(x, y) by direct double substitution.
    Rational eval(const Rational& x, const Rational& y) const {
        Rational acc = 0;
        for (const auto& [ij, c] : table_) {
            auto [i, j] = ij;
            acc += Rational(c) * rpow(x, i) * rpow(y, j);
            if (i != j) acc += Rational(c) * rpow(x, j) * rpow(y, i);
        }
        return acc;
    }

private:
    void validate() const {
        if (level_ < 2) throw ModpolyIntegrityError("level must be at least 2");
        if (table_.empty()) throw ModpolyIntegrityError("level " + std::to_string(level_) + ": no coefficients");
        const int D = degree();
        int top = 0;
        for (const auto& [ij, c] : table_) {
            if (ij.first < ij.second) throw ModpolyIntegrityError("triangular storage violated");
            if (c == 0) continue;
            top = std::max(top, ij.first);
        }
        if (top != D)
            throw ModpolyIntegrityError("level " + std::to_string(level_) + ": X-degree " + std::to_string(top) +
                                        " differs from psi(N) = " + std::to_string(D));
        if (coeff(D, 0) != 1)
            throw ModpolyIntegrityError("level " + std::to_string(level_) + ": not monic in X (coefficient of X^" +
                                        std::to_string(D) + " is " + coeff(D, 0).get_str() + ")");
        for (int j = 1; j <= D; ++j)
            if (coeff(D, j) != 0)
                throw ModpolyIntegrityError("level " + std::to_string(level_) + ": X^" + std::to_string(D) +
                                            " has a Y-dependent coefficient");
    }

    int level_;
    Table table_;
};

/// Parses the sparse text format; `source` is used in error messages.
inline ModularPolynomial parse_modpoly(std::istream& in, int level, const std::string& source = "<input>") {
    ModularPolynomial::Table table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::string body = line.substr(start);
        int i = 0, j = 0;
        char close = 0;
        int consumed = 0;
        if (std::sscanf(body.c_str(), "[%d,%d%c%n", &i, &j, &close, &consumed) != 3 || close != ']')
            throw ModpolyFormatError(source, lineno, "expected '[i,j] c'");
        if (i < 0 || j < 0) throw ModpolyFormatError(source, lineno, "negative exponent");
        if (i < j) throw ModpolyFormatError(source, lineno, "exponent pair with i < j");
        std::string rest = body.substr(static_cast<std::size_t>(consumed));
        std::size_t a = rest.find_first_not_of(" \t");
        std::size_t b = rest.find_last_not_of(" \t");
        if (a == std::string::npos) throw ModpolyFormatError(source, lineno, "missing coefficient");
        rest = rest.substr(a, b - a + 1);
        std::size_t digits = (rest[0] == '-' || rest[0] == '+') ? 1 : 0;
        if (digits == rest.size() || rest.find_first_not_of("0123456789", digits) != std::string::npos)
            throw ModpolyFormatError(source, lineno, "malformed integer coefficient '" + rest + "'");
        if (rest[0] == '+') rest = rest.substr(1);
        auto key = std::make_pair(i, j);
        if (table.count(key)) throw ModpolyFormatError(source, lineno, "duplicate exponent pair");
        table.emplace(key, Integer(rest, 10));
    }
    if (table.empty()) throw ModpolyFormatError(source, lineno, "no coefficients");
    return ModularPolynomial(level, std::move(table));
}

inline ModularPolynomial load_modpoly(const std::string& path, int level) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open modular polynomial file '" + path + "'");
    return parse_modpoly(in, level, path);
}

inline void write_modpoly(std::ostream& out, const ModularPolynomial& phi) {
    for (auto it = phi.table().rbegin(); it != phi.table().rend(); ++it)
        if (it->second != 0) out << "[" << it->first.first << "," << it->first.second << "] " << it->second << "\n";
}

struct SpecializedPoly {
    int level = 0;
    Rational j;
    PolyQ poly;  // primitive integer form of Phi(X, j)
};

inline SpecializedPoly specialize(const ModularPolynomial& phi, Rational j) {
    j.canonicalize();
    const int D = phi.degree();
    std::vector<Rational> c(static_cast<std::size_t>(D) + 1);
    std::vector<Rational> jpow(static_cast<std::size_t>(D) + 1);
    jpow[0] = 1;
    for (int k = 1; k <= D; ++k) jpow[static_cast<std::size_t>(k)] = jpow[static_cast<std::size_t>(k) - 1] * j;
    for (const auto& [ij, v] : phi.table()) {
        auto [a, b] = ij;
        c[static_cast<std::size_t>(a)] += Rational(v) * jpow[static_cast<std::size_t>(b)];
        if (a != b) c[static_cast<std::size_t>(b)] += Rational(v) * jpow[static_cast<std::size_t>(a)];
    }
    PolyQ p = PolyQ::from_integers(PolyQ(std::move(c)).primitive_integer());
    if (p.degree() != D) throw ModpolyIntegrityError("specialisation lost degree");
    return {phi.level(), j, std::move(p)};
}

enum class WitnessStatus { Certified, Indeterminate, NotSquarefree };

inline std::string to_string(WitnessStatus s) {
    switch (s) {
        case WitnessStatus::Certified: return "Certified";
        case WitnessStatus::Indeterminate: return "Indeterminate";
        case WitnessStatus::NotSquarefree: return "NotSquarefree";
    }
    return "?";
}

struct DegreeWitness {
    WitnessStatus status = WitnessStatus::Indeterminate;
    std::string method;                   // "degree-patterns" or "factorization" when Certified
    DegreeMultiset degrees;               // when Certified
    int min_degree = 0;                   // when Certified
    std::set<DegreeMultiset> candidates;  // compatible multisets after the last pattern step
    std::vector<std::uint64_t> primes;
    std::optional<PolyQ> gcd_witness;     // when NotSquarefree
    SpecializedPoly specialized;
};

enum class Fallback { None, Factorize };

/// Escalates the prime set from the least good prime >= 11 until the compatible degree multisets
/// collapse to one, giving up after `max_primes`. With Fallback::Factorize an inconclusive pattern
/// search is settled by a full factorisation over Q.
inline DegreeWitness isogeny_degree_witness(const ModularPolynomial& phi, const Rational& j, int max_primes = 25,
                                            Fallback fallback = Fallback::None) {
    DegreeWitness w;
    w.specialized = specialize(phi, j);
    const PolyQ& f = w.specialized.poly;
    ZCoeffs z = f.primitive_integer();
    if (!detail::squarefree_mod_some_prime(z)) {
        PolyQ g = poly_gcd(f, f.derivative());
        if (g.degree() > 0) {
            w.status = WitnessStatus::NotSquarefree;
            w.gcd_witness = PolyQ::from_integers(g.primitive_integer());
            return w;
        }
    }
    // Candidate enumeration is re-run only at these prime counts.
    auto checkpoint = [max_primes](std::size_t k) {
        return k == 3 || k == 5 || k == 8 || k == 12 || k == 17 || static_cast<int>(k) == max_primes;
    };
    std::vector<std::uint64_t> primes;
    for (std::uint64_t p = 11; static_cast<int>(primes.size()) < max_primes; p = next_prime(p)) {
        if (!is_good_reduction(z, p)) continue;
        primes.push_back(p);
        if (!checkpoint(primes.size())) continue;
        try {
            w.candidates = certify_factor_degrees(f, primes);
        } catch (const BadPrimeError&) {
            throw;
        } catch (const Error&) {
            w.candidates.clear();  // too many candidates so far; more primes will prune them
            continue;
        }
        if (w.candidates.size() == 1) break;
    }
    w.primes = primes;
    if (w.candidates.size() == 1) {
        w.status = WitnessStatus::Certified;
        w.method = "degree-patterns";
        w.degrees = *w.candidates.begin();
    } else if (fallback == Fallback::Factorize) {
        w.status = WitnessStatus::Certified;
        w.method = "factorization";
        w.degrees = factor_over_q(f).degrees();
    }
    if (w.status == WitnessStatus::Certified) w.min_degree = *std::min_element(w.degrees.begin(), w.degrees.end());
    return w;
}

}  // namespace isogate
