#pragma once

// Check registry for proof steps 1-9, configuration loading, parallel execution and report
// serialisation (json and text).

#include "isogate/gl2.hpp"
#include "isogate/jmatch.hpp"
#include "isogate/lift.hpp"
#include "isogate/modpoly.hpp"
#include "isogate/x091.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#ifndef ISOGATE_VERSION
#define ISOGATE_VERSION "0.0.0"
#endif

namespace isogate::pipeline {

using json = nlohmann::json;

inline constexpr const char* kVersion = ISOGATE_VERSION;

// ---------------------------------------------------------------------------------------------
// Configuration

class ConfigError : public Error {
public:
    ConfigError(const std::string& pointer, const std::string& why)
        : Error("config " + (pointer.empty() ? std::string("/") : pointer) + ": " + why), pointer(pointer) {}
    std::string pointer;
};

struct GeneratorSet {
    std::string name;
    std::uint32_t modulus = 0;
    std::vector<MatZmod> matrices;
};

struct PrimeCaps {
    int modpoly_primes = 25;            // pattern primes before the factorisation fallback
    std::uint64_t zeta_max_prime = 31;  // quotient-curve zeta checks run over good primes up to this
};

struct Config {
    std::string source;                      // path of the document, empty for the built-in default
    std::map<int, std::string> modpoly;      // level -> resolved file path
    std::map<std::string, GeneratorSet> groups;
    PrimeCaps caps;
    std::string digest = "none";             // FNV-1a of the canonical document

    const GeneratorSet* group(const std::string& name) const {
        auto it = groups.find(name);
        return it == groups.end() ? nullptr : &it->second;
    }
};

inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Moduli required for group names with a fixed role.
inline const std::map<std::string, std::uint32_t>& reserved_group_moduli() {
    static const std::map<std::string, std::uint32_t> m = {{"level27", 27}, {"G3_5", 5}};
    return m;
}

namespace detail {

inline std::int64_t json_int(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) throw ConfigError(ptr, "expected an integer");
    return v.get<std::int64_t>();
}

inline MatZmod parse_matrix(const json& v, std::uint32_t modulus, const std::string& ptr) {
    const json* rows = &v;
    if (v.is_object()) {
        for (const auto& [k, _] : v.items())
            if (k != "modulus" && k != "rows") throw ConfigError(ptr + "/" + k, "unknown key");
        if (!v.contains("rows")) throw ConfigError(ptr, "matrix object needs 'rows'");
        if (v.contains("modulus")) {
            auto m = json_int(v["modulus"], ptr + "/modulus");
            if (m != modulus)
                throw ConfigError(ptr + "/modulus",
                                  "modulus mismatch: matrix has " + std::to_string(m) + ", set has " + std::to_string(modulus));
        }
        rows = &v["rows"];
    }
    const std::string rptr = v.is_object() ? ptr + "/rows" : ptr;
    if (!rows->is_array() || rows->size() != 2) throw ConfigError(rptr, "expected [[a, b], [c, d]]");
    std::int64_t e[4];
    for (std::size_t i = 0; i < 2; ++i) {
        const json& row = (*rows)[i];
        const std::string p = rptr + "/" + std::to_string(i);
        if (!row.is_array() || row.size() != 2) throw ConfigError(p, "expected a row of two integers");
        for (std::size_t j = 0; j < 2; ++j) e[2 * i + j] = json_int(row[j], p + "/" + std::to_string(j));
    }
    MatZmod g(modulus, e[0], e[1], e[2], e[3]);
    if (!g.invertible())
        throw ConfigError(ptr, "matrix " + g.to_string() + " is not invertible mod " + std::to_string(modulus) +
                                   " (det " + std::to_string(g.det()) + ")");
    return g;
}

}  // namespace detail

/// Validates a configuration document; relative modpoly paths are resolved against `base`.
inline Config parse_config(const json& doc, const std::filesystem::path& base, const std::string& source = "") {
    if (!doc.is_object()) throw ConfigError("", "expected a JSON object");
    Config cfg;
    cfg.source = source;
    for (const auto& [k, _] : doc.items())
        if (k != "modpoly" && k != "groups" && k != "prime_caps" && k != "description")
            throw ConfigError("/" + k, "unknown key");
    if (doc.contains("description") && !doc["description"].is_string())
        throw ConfigError("/description", "expected a string");
    if (doc.contains("modpoly")) {
        const json& mp = doc["modpoly"];
        if (!mp.is_object()) throw ConfigError("/modpoly", "expected an object keyed by level");
        for (const auto& [k, v] : mp.items()) {
            const std::string ptr = "/modpoly/" + k;
            int level = 0;
            try {
                std::size_t used = 0;
                level = std::stoi(k, &used);
                if (used != k.size()) throw std::invalid_argument(k);
            } catch (const std::exception&) {
                throw ConfigError(ptr, "level must be an integer");
            }
            if (level < 2) throw ConfigError(ptr, "level must be at least 2");
            if (!v.is_string()) throw ConfigError(ptr, "expected a file path");
            std::filesystem::path p(v.get<std::string>());
            if (p.is_relative()) p = base / p;
            if (!std::filesystem::is_regular_file(p)) throw ConfigError(ptr, "file not found: " + p.string());
            cfg.modpoly[level] = p.lexically_normal().string();
        }
    }
    if (doc.contains("groups")) {
        const json& gs = doc["groups"];
        if (!gs.is_object()) throw ConfigError("/groups", "expected an object keyed by name");
        for (const auto& [name, v] : gs.items()) {
            const std::string ptr = "/groups/" + name;
            if (!v.is_object()) throw ConfigError(ptr, "expected {\"modulus\": N, \"matrices\": [...]}");
            for (const auto& [k, _] : v.items())
                if (k != "modulus" && k != "matrices") throw ConfigError(ptr + "/" + k, "unknown key");
            if (!v.contains("modulus")) throw ConfigError(ptr, "missing 'modulus'");
            auto m = detail::json_int(v["modulus"], ptr + "/modulus");
            if (m < 2 || m > kMaxModulus) throw ConfigError(ptr + "/modulus", "modulus out of range");
            auto res = reserved_group_moduli().find(name);
            if (res != reserved_group_moduli().end() && res->second != m)
                throw ConfigError(ptr + "/modulus", "modulus mismatch: '" + name + "' must have modulus " +
                                                        std::to_string(res->second));
            if (!v.contains("matrices") || !v["matrices"].is_array() || v["matrices"].empty())
                throw ConfigError(ptr + "/matrices", "expected a non-empty list of matrices");
            GeneratorSet set{name, static_cast<std::uint32_t>(m), {}};
            for (std::size_t i = 0; i < v["matrices"].size(); ++i)
                set.matrices.push_back(detail::parse_matrix(v["matrices"][i], set.modulus,
                                                            ptr + "/matrices/" + std::to_string(i)));
            cfg.groups[name] = std::move(set);
        }
    }
    if (doc.contains("prime_caps")) {
        const json& pc = doc["prime_caps"];
        if (!pc.is_object()) throw ConfigError("/prime_caps", "expected an object");
        for (const auto& [k, v] : pc.items()) {
            const std::string ptr = "/prime_caps/" + k;
            auto n = detail::json_int(v, ptr);
            if (k == "modpoly_primes") {
                if (n < 1 || n > 200) throw ConfigError(ptr, "must be between 1 and 200");
                cfg.caps.modpoly_primes = static_cast<int>(n);
            } else if (k == "zeta_max_prime") {
                if (n < 3 || n > 2000) throw ConfigError(ptr, "must be between 3 and 2000");
                cfg.caps.zeta_max_prime = static_cast<std::uint64_t>(n);
            } else {
                throw ConfigError(ptr, "unknown prime cap");
            }
        }
    }
    cfg.digest = fnv1a_hex(doc.dump());
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
    }
    auto base = std::filesystem::absolute(std::filesystem::path(path)).parent_path();
    return parse_config(doc, base, path);
}

// ---------------------------------------------------------------------------------------------
// Results and reports

enum class Status { Pass, Fail, Indeterminate, Literature };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "Pass";
        case Status::Fail: return "Fail";
        case Status::Indeterminate: return "Indeterminate";
        case Status::Literature: return "Literature";
    }
    return "?";
}

inline Status parse_status(const std::string& s) {
    if (s == "Pass") return Status::Pass;
    if (s == "Fail") return Status::Fail;
    if (s == "Indeterminate") return Status::Indeterminate;
    if (s == "Literature") return Status::Literature;
    throw ParseError("unknown status '" + s + "'");
}

struct CheckResult {
    std::string id;
    std::string kind;  // jmatch, lift, orbit, modpoly, curve, literature
    std::string title;
    Status status = Status::Pass;
    json computed = json::object();
    json expected = json::object();
    std::string diff;      // Fail
    std::string citation;  // Literature
    std::string reason;    // Indeterminate
    std::optional<double> wall_ms;

    friend bool operator==(const CheckResult& a, const CheckResult& b) {
        return a.id == b.id && a.kind == b.kind && a.title == b.title && a.status == b.status &&
               a.computed == b.computed && a.expected == b.expected && a.diff == b.diff &&
               a.citation == b.citation && a.reason == b.reason && a.wall_ms == b.wall_ms;
    }
};

struct Summary {
    std::size_t total = 0, pass = 0, fail = 0, indeterminate = 0, literature = 0;
    friend bool operator==(const Summary&, const Summary&) = default;
};

struct RunReport {
    std::string version = kVersion;
    std::string config_digest = "none";
    std::string filter;
    std::vector<CheckResult> results;  // sorted by id

    Summary summary() const {
        Summary s;
        for (const auto& r : results) {
            ++s.total;
            switch (r.status) {
                case Status::Pass: ++s.pass; break;
                case Status::Fail: ++s.fail; break;
                case Status::Indeterminate: ++s.indeterminate; break;
                case Status::Literature: ++s.literature; break;
            }
        }
        return s;
    }
    bool failed() const { return summary().fail > 0; }
    const CheckResult* find(const std::string& id) const {
        for (const auto& r : results)
            if (r.id == id) return &r;
        return nullptr;
    }

    friend bool operator==(const RunReport& a, const RunReport& b) {
        return a.version == b.version && a.config_digest == b.config_digest && a.filter == b.filter &&
               a.results == b.results;
    }
};

inline json to_json(const CheckResult& r) {
    json j;
    j["id"] = r.id;
    j["kind"] = r.kind;
    j["title"] = r.title;
    j["status"] = to_string(r.status);
    j["computed"] = r.computed;
    if (!r.expected.empty()) j["expected"] = r.expected;
    if (!r.diff.empty()) j["diff"] = r.diff;
    if (!r.citation.empty()) j["citation"] = r.citation;
    if (!r.reason.empty()) j["reason"] = r.reason;
    if (r.wall_ms) j["wall_ms"] = *r.wall_ms;
    return j;
}

inline json to_json(const RunReport& rep) {
    json j;
    j["toolkit"] = "isogate";
    j["version"] = rep.version;
    j["config_digest"] = rep.config_digest;
    j["filter"] = rep.filter;
    Summary s = rep.summary();
    j["summary"] = {{"total", s.total}, {"pass", s.pass}, {"fail", s.fail}, {"indeterminate", s.indeterminate},
                    {"literature", s.literature}};
    j["checks"] = json::array();
    for (const auto& r : rep.results) j["checks"].push_back(to_json(r));
    return j;
}

inline RunReport report_from_json(const json& j) {
    RunReport rep;
    rep.version = j.at("version").get<std::string>();
    rep.config_digest = j.at("config_digest").get<std::string>();
    rep.filter = j.at("filter").get<std::string>();
    for (const auto& c : j.at("checks")) {
        CheckResult r;
        r.id = c.at("id").get<std::string>();
        r.kind = c.at("kind").get<std::string>();
        r.title = c.at("title").get<std::string>();
        r.status = parse_status(c.at("status").get<std::string>());
        r.computed = c.at("computed");
        if (c.contains("expected")) r.expected = c["expected"];
        if (c.contains("diff")) r.diff = c["diff"].get<std::string>();
        if (c.contains("citation")) r.citation = c["citation"].get<std::string>();
        if (c.contains("reason")) r.reason = c["reason"].get<std::string>();
        if (c.contains("wall_ms")) r.wall_ms = c["wall_ms"].get<double>();
        rep.results.push_back(std::move(r));
    }
    Summary s = rep.summary();
    const json& js = j.at("summary");
    if (js.at("total") != s.total || js.at("fail") != s.fail || js.at("pass") != s.pass ||
        js.at("indeterminate") != s.indeterminate || js.at("literature") != s.literature)
        throw ParseError("report summary does not match its checks");
    return rep;
}

inline std::string emit_json(const RunReport& rep) { return to_json(rep).dump(2) + "\n"; }

inline std::string emit_text(const RunReport& rep) {
    std::size_t w = 2;
    for (const auto& r : rep.results) w = std::max(w, r.id.size());
    std::ostringstream out;
    out << "isogate " << rep.version << "  config " << rep.config_digest;
    if (!rep.filter.empty()) out << "  filter " << rep.filter;
    out << "\n\n" << std::left << std::setw(static_cast<int>(w) + 2) << "ID" << std::setw(15) << "STATUS"
        << "DETAIL\n";
    for (const auto& r : rep.results) {
        std::string detail = r.title;
        if (r.status == Status::Fail) detail = r.diff;
        if (r.status == Status::Literature) detail = r.citation;
        if (r.status == Status::Indeterminate) detail = r.reason;
        out << std::setw(static_cast<int>(w) + 2) << r.id << std::setw(15) << to_string(r.status) << detail;
        if (r.wall_ms) out << "  (" << std::fixed << std::setprecision(1) << *r.wall_ms << " ms)";
        out << "\n";
    }
    Summary s = rep.summary();
    out << "\n" << s.total << " checks: " << s.pass << " pass, " << s.fail << " fail, " << s.indeterminate
        << " indeterminate, " << s.literature << " literature\n";
    return out.str();
}

// ---------------------------------------------------------------------------------------------
// Check construction helpers

namespace detail {

class Check {
public:
    Check(std::string id, std::string kind, std::string title) {
        r_.id = std::move(id);
        r_.kind = std::move(kind);
        r_.title = std::move(title);
    }
    /// Records an expectation; a mismatch turns the result into Fail with a diff line.
    Check& expect(const std::string& key, const json& want, const json& got) {
        r_.expected[key] = want;
        r_.computed[key] = got;
        if (want != got) diffs_.push_back(key + ": expected " + want.dump() + ", computed " + got.dump());
        return *this;
    }
    Check& info(const std::string& key, json v) {
        r_.computed[key] = std::move(v);
        return *this;
    }
    CheckResult done() {
        r_.status = diffs_.empty() ? Status::Pass : Status::Fail;
        for (std::size_t i = 0; i < diffs_.size(); ++i) r_.diff += (i ? "; " : "") + diffs_[i];
        return r_;
    }
    CheckResult indeterminate(const std::string& reason) {
        r_.status = Status::Indeterminate;
        r_.reason = reason;
        return r_;
    }

private:
    CheckResult r_;
    std::vector<std::string> diffs_;
};

inline CheckResult literature(std::string id, std::string title, std::string citation) {
    CheckResult r;
    r.id = std::move(id);
    r.kind = "literature";
    r.title = std::move(title);
    r.status = Status::Literature;
    r.citation = std::move(citation);
    return r;
}

inline json rationals(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(isogate::to_string(x));
    return a;
}

inline json integers(const std::vector<Integer>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

inline json sizes(const std::vector<std::size_t>& v) { return json(v); }

template <typename C>
json sorted_json(const C& c) {
    std::vector<typename C::value_type> v(c.begin(), c.end());
    std::sort(v.begin(), v.end());
    return json(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Shared computations

/// Index-2 subgroup of N_s(p) outside the split Cartan with surjective determinant, first in code order.
inline MatrixGroup derived_index_two_of_split_normalizer(std::uint32_t p) {
    auto ns = standard_group("split_cartan_normalizer", p);
    auto cs = standard_group("split_cartan", p);
    for (const auto& h : index_two_subgroups(ns)) {
        if (h.subset_of(cs)) continue;
        std::set<std::uint32_t> dets;
        h.for_each([&](const MatZmod& x) { dets.insert(x.det()); });
        if (dets.size() == p - 1) return h;
    }
    throw Error("no index-2 subgroup of N_s(" + std::to_string(p) + ") with surjective determinant");
}

/// Kernel of GL2(Z/p^k) -> GL2(Z/p^(k-1)).
inline MatrixGroup reduction_kernel(std::uint32_t p, int k) {
    std::uint32_t m = 1, s = 1;
    for (int i = 0; i < k; ++i) m *= p;
    s = m / p;
    std::vector<MatZmod> gens = {MatZmod(m, 1 + s, 0, 0, 1), MatZmod(m, 1, s, 0, 1), MatZmod(m, 1, 0, s, 1),
                                 MatZmod(m, 1, 0, 0, 1 + s)};
    return group_closure(gens, m);
}

inline MatrixGroup preimage_mod_p_squared(const MatrixGroup& g, std::uint32_t p) {
    std::vector<MatZmod> gens;
    for (const auto& x : g.generators()) gens.push_back(MatZmod(p * p, x.a, x.b, x.c, x.d));
    auto ker = reduction_kernel(p, 2);
    for (const auto& x : ker.generators()) gens.push_back(x);
    return group_closure(gens, p * p);
}

inline json lift_class_json(const LiftClass& c) {
    json j;
    j["order"] = c.order;
    j["outcome"] = to_string(c.outcome);
    j["kernel_dim"] = c.kernel_dim;
    j["scalars_one_mod_p"] = c.scalars_one_mod_p;
    j["orbits"] = c.orbits.lengths;
    j["conjugate_into_split_normalizer"] = c.split_normalizer_witness.has_value();
    return j;
}

inline json group_json(const MatrixGroup& g) {
    json gens = json::array();
    for (const auto& x : small_generating_set(g)) gens.push_back({x.a, x.b, x.c, x.d});
    return {{"modulus", g.modulus()}, {"order", g.order()}, {"generators", gens}};
}

// ---------------------------------------------------------------------------------------------
// Registry

struct Context {
    const Config& config;
};

/// A unit of work producing one or more results; the ids are known before running.
struct Task {
    std::vector<std::string> ids;
    std::function<std::vector<CheckResult>(const Context&)> run;
};

namespace checks {

using detail::Check;
using detail::literature;

inline CheckResult jmatch_row(const std::string& id, int q, int p, const std::string& family, Requirement req,
                              const std::vector<Rational>& constants) {
    Check c(id, "jmatch",
            "j = " + family + "(h) against the " + std::to_string(q) + "-isogeny j-invariants (p = " +
                std::to_string(p) + ")");
    JFamily fam = builtin_family(family);
    json rows = json::array();
    json eliminated = json::array();
    for (const auto& k : constants) {
        MatchOutcome m = match_constant(fam, k);
        bool ok = eliminates(m, req);
        eliminated.push_back(ok);
        rows.push_back({{"j", isogate::to_string(k)},
                        {"elimination_degree", m.elimination.degree()},
                        {"verdict", to_string(m.verdict)},
                        {"rational_roots", detail::rationals(m.rational_roots)},
                        {"quadratic_fields", detail::integers(m.quadratic_fields)},
                        {"eliminated", ok}});
    }
    c.info("family", family).info("requirement", to_string(req)).info("constants", rows);
    c.expect("eliminated", json(std::vector<bool>(constants.size(), true)), eliminated);
    return c.done();
}

inline CheckResult disjoint_sets(const std::string& id, int q, int p) {
    Check c(id, "jmatch",
            "no j-invariant carries rational " + std::to_string(q) + "- and " + std::to_string(p) + "-isogenies");
    auto a = isolated_j_invariants(q), b = isolated_j_invariants(p);
    std::vector<Rational> common;
    for (const auto& x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) common.push_back(x);
    c.info("j_" + std::to_string(q), detail::rationals(a)).info("j_" + std::to_string(p), detail::rationals(b));
    c.expect("common", json::array(), detail::rationals(common));
    return c.done();
}

inline std::vector<Task> step1() {
    std::vector<Task> out;
    const std::vector<std::pair<int, std::pair<std::string, Requirement>>> rows = {
        {7, {"j7", Requirement::NoDegreeLE2Root}},
        {5, {"j5", Requirement::NoDegreeLE2Root}},
        {3, {"j3cube", Requirement::NoRationalRoot}},
        {2, {"j2disc", Requirement::NoRationalRoot}}};
    for (int q : {37, 17, 11})
        for (const auto& [p, fr] : rows) {
            std::string id = "step1.q" + std::to_string(q) + ".p" + std::to_string(p);
            auto [fam, req] = fr;
            out.push_back({{id}, [=](const Context&) {
                               return std::vector<CheckResult>{jmatch_row(id, q, p, fam, req, isolated_j_invariants(q))};
                           }});
        }
    // Pairs where both isogenies would be rational.
    for (auto [q, p] : {std::pair{37, 17}, {37, 11}, {17, 11}}) {
        std::string id = "step1.q" + std::to_string(q) + ".p" + std::to_string(p);
        out.push_back({{id}, [=](const Context&) { return std::vector<CheckResult>{disjoint_sets(id, q, p)}; }});
    }
    for (int q : {37, 17, 11}) {
        if (q == 11) continue;
        std::string id = "step1.q" + std::to_string(q) + ".p13";
        out.push_back({{id}, [=](const Context&) {
                           return std::vector<CheckResult>{jmatch_row(id, q, 13, "j13", Requirement::NoRationalRoot,
                                                                      isolated_j_invariants(q))};
                       }});
    }
    out.push_back({{"step1.q11.p13"}, [](const Context&) {
                       return std::vector<CheckResult>{jmatch_row("step1.q11.p13", 11, 13, "j13",
                                                                  Requirement::NoRationalRoot, isolated_j_invariants(11))};
                   }});
    auto curve_search = [](const std::string& id, const std::string& other, const std::string& shape,
                           std::function<bool(const Rational&)> pred) {
        Check c(id, "curve", "j13(h) = " + shape + ": curve construction and small-height search");
        BiPoly F = match_families(builtin_family("j13"), builtin_family(other));
        c.info("degree_t", F.degree_t()).info("degree_s", F.degree_s()).info("height_bound", 40);
        auto hits = small_height_parameters(builtin_family("j13"), 40, pred);
        c.expect("rational_hits", json::array(), detail::rationals(hits));
        return c.done();
    };
    out.push_back({{"step1.q13.p3"}, [=](const Context&) {
                       return std::vector<CheckResult>{curve_search(
                           "step1.q13.p3", "j3cube", "t^3", [](const Rational& j) { return exact_root(j, 3).has_value(); })};
                   }});
    out.push_back({{"step1.q13.p2"}, [=](const Context&) {
                       return std::vector<CheckResult>{
                           curve_search("step1.q13.p2", "j2disc", "t^2 + 1728",
                                        [](const Rational& j) { return exact_root(j - 1728, 2).has_value(); })};
                   }});
    std::vector<CheckResult> lit = {
        literature("step1.rational-isogenies", "degrees of rational cyclic isogenies of non-CM curves",
                   "Mazur; Kenku: no rational cyclic isogeny of degree 22, 26, 33, 34, 39, 74, 111, 143, 187, 221, 481"),
        literature("step1.q13.p3-chabauty", "rational points of the genus-2 curve j13(h) = t^3",
                   "rank 0 Jacobian; Chabauty0 (Magma) finds a single rational point, not giving a non-CM curve"),
        literature("step1.q13.p2-points", "rational points of the genus-1 curve j13(h) = t^2 + 1728",
                   "the curve has exactly one rational point, not giving a non-CM curve"),
        literature("step1.q13.p5", "quadratic points on X0(65)",
                   "Box, Section 4: all quadratic points come from X0(65)+(Q); w65 argument forces CM"),
        literature("step1.q7.p5", "quadratic points on X0(35)",
                   "Bruin-Najman, Table 9: one exceptional quadratic point (CM); w35 argument forces CM"),
        literature("step1.q13.p7", "the pair (7, 13), i.e. n = 91", "handled by the X0(91) checks, see step9.*"),
    };
    for (auto& r : lit) out.push_back({{r.id}, [r](const Context&) { return std::vector<CheckResult>{r}; }});
    return out;
}

inline constexpr const char* kJ49 = "2268945/128";

inline std::vector<Task> step2() {
    std::vector<Task> out;
    out.push_back({{"step2.p7.lifts"}, [](const Context&) {
                       Check c("step2.p7.lifts", "lift", "subgroups of GL2(Z/49) reducing onto N_s(7)");
                       auto r = lift_subgroups(standard_group("split_cartan_normalizer", 7), 7);
                       std::multiset<std::size_t> orders;
                       json classes = json::array(), orbit_bound = json::array();
                       for (const auto& k : r.classes) {
                           orders.insert(k.order);
                           classes.push_back(lift_class_json(k));
                           if (k.outcome == LiftOutcome::OrbitBound) orbit_bound.push_back(k.orbits.lengths);
                       }
                       c.info("classes", classes);
                       c.expect("class_count", 8, r.classes.size());
                       c.expect("orders", json({72, 504, 504, 3528, 3528, 24696, 24696, 172872}),
                                detail::sorted_json(orders));
                       c.expect("outcomes", json({{"ConjugateIntoSplitNormalizer", 2}, {"OrbitBound", 2},
                                                  {"ScalarFail", 4}, {"Unclassified", 0}}),
                                json({{"ConjugateIntoSplitNormalizer", r.count(LiftOutcome::ConjugateIntoSplitNormalizer)},
                                      {"OrbitBound", r.count(LiftOutcome::OrbitBound)},
                                      {"ScalarFail", r.count(LiftOutcome::ScalarFail)},
                                      {"Unclassified", r.count(LiftOutcome::Unclassified)}}));
                       c.expect("orbit_bound_orbits", json({{14, 42}, {14, 42}}), orbit_bound);
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step2.p7.mindegree", "step2.p7.modpoly"}, [](const Context& ctx) {
                       Check exact("step2.p7.modpoly", "modpoly",
                                   std::string("factor degrees of Phi_49(X, ") + kJ49 + ")");
                       Check low("step2.p7.mindegree", "modpoly",
                                 std::string("least factor degree of Phi_49(X, ") + kJ49 + ")");
                       auto it = ctx.config.modpoly.find(49);
                       if (it == ctx.config.modpoly.end()) {
                           const std::string why = "no level-49 modular polynomial configured (modpoly.49)";
                           return std::vector<CheckResult>{low.indeterminate(why), exact.indeterminate(why)};
                       }
                       auto phi = load_modpoly(it->second, 49);
                       auto w = isogeny_degree_witness(phi, parse_rational(kJ49), ctx.config.caps.modpoly_primes,
                                                       Fallback::Factorize);
                       for (Check* c : {&exact, &low}) {
                           c->info("witness", to_string(w.status)).info("method", w.method);
                           c->info("pattern_primes", w.primes.size()).info("pattern_candidates", w.candidates.size());
                           c->info("degree", w.specialized.poly.degree());
                       }
                       exact.expect("degrees", json({14, 14, 21}), json(w.degrees));
                       low.expect("min_degree", 14, w.min_degree);
                       low.info("degrees", w.degrees);
                       return std::vector<CheckResult>{low.done(), exact.done()};
                   }});
    std::vector<CheckResult> lit = {
        literature("step2.large-p", "p > 7: a p-isogeny is rational, so rho is defined modulo p",
                   "Lombardo-Tronto, Theorem 3.9 (Sylow pro-p subgroup in the image)"),
        literature("step2.p7.images", "mod-7 images inside N_s(7)",
                   "Zywina, Theorem 1.5: three possible images, two only for j = 2268945/128"),
        literature("step2.p7.scalars", "images contain all scalars congruent to 1 mod p",
                   "Lombardo-Tronto, Theorem 3.16"),
        literature("step2.p7.xs49", "rational points of X_s(49) = X0+(7^4)",
                   "Momose-Shimura, Theorem 3.14: only cusps and CM points"),
    };
    for (auto& r : lit) out.push_back({{r.id}, [r](const Context&) { return std::vector<CheckResult>{r}; }});
    return out;
}

inline CheckResult mod25_lifts(const std::string& id, const MatrixGroup& g, const std::string& source) {
    Check c(id, "lift", "subgroups of GL2(Z/25) reducing onto " + source);
    auto r = lift_subgroups(g, 5);
    json classes = json::array();
    std::set<std::vector<std::size_t>> ob;
    std::set<std::size_t> sums;
    for (const auto& k : r.classes) {
        classes.push_back(lift_class_json(k));
        if (k.outcome == LiftOutcome::OrbitBound) ob.insert(k.orbits.lengths);
        sums.insert(std::accumulate(k.orbits.lengths.begin(), k.orbits.lengths.end(), std::size_t{0}));
    }
    c.info("group", group_json(g)).info("classes", classes).info("class_count", r.classes.size());
    c.expect("unclassified", 0, r.count(LiftOutcome::Unclassified));
    c.expect("orbit_bound_orbits", json::array({{10, 20}}), detail::sorted_json(ob));
    c.expect("orbit_sums", json::array({30}), detail::sorted_json(sums));
    return c.done();
}

inline CheckResult kernel_orbits(const std::string& id, std::uint32_t p, int k) {
    std::uint32_t m = 1;
    for (int i = 0; i < k; ++i) m *= p;
    Check c(id, "orbit",
            "kernel of reduction mod " + std::to_string(m / p) + " on cyclic subgroups of order " + std::to_string(m));
    auto o = cyclic_subgroup_orbits(reduction_kernel(p, k));
    std::set<std::size_t> lengths(o.lengths.begin(), o.lengths.end());
    c.info("kernel_order", o.group_order).info("subgroups", o.acted_on);
    c.expect("orbit_lengths", json::array({p}), detail::sorted_json(lengths));
    c.expect("orbit_count", o.acted_on / p, o.lengths.size());
    return c.done();
}

inline std::vector<Task> step3() {
    std::vector<Task> out;
    out.push_back({{"step3.p5.lifts.ns"}, [](const Context&) {
                       return std::vector<CheckResult>{
                           mod25_lifts("step3.p5.lifts.ns", standard_group("split_cartan_normalizer", 5), "N_s(5)")};
                   }});
    out.push_back({{"step3.p5.lifts.g3"}, [](const Context& ctx) {
                       std::string source = "G3 (derived index-2 subgroup of N_s(5))";
                       MatrixGroup g;
                       if (const auto* set = ctx.config.group("G3_5")) {
                           g = group_closure(set->matrices, 5);
                           source = "G3 (config group G3_5)";
                       } else {
                           g = derived_index_two_of_split_normalizer(5);
                       }
                       auto r = mod25_lifts("step3.p5.lifts.g3", g, source);
                       auto ns = standard_group("split_cartan_normalizer", 5);
                       if (r.status == Status::Pass && !(g.subset_of(ns) && g.order() * 2 == ns.order())) {
                           r.status = Status::Fail;
                           r.diff = "group is not an index-2 subgroup of N_s(5)";
                       }
                       return std::vector<CheckResult>{r};
                   }});
    out.push_back({{"step3.p5.kernel-orbits"},
                   [](const Context&) { return std::vector<CheckResult>{kernel_orbits("step3.p5.kernel-orbits", 5, 3)}; }});
    out.push_back({{"step3.p3.lifts"}, [](const Context&) {
                       Check c("step3.p3.lifts", "lift", "subgroups of GL2(Z/9) reducing onto N_s(3)");
                       auto g = standard_group("split_cartan_normalizer", 3);
                       auto r = lift_subgroups(g, 3);
                       std::size_t six = 0, into = 0;
                       std::set<std::size_t> sums;
                       std::multiset<std::size_t> orders, oracle;
                       json classes = json::array();
                       for (const auto& k : r.classes) {
                           classes.push_back(lift_class_json(k));
                           six += std::all_of(k.orbits.lengths.begin(), k.orbits.lengths.end(),
                                              [](std::size_t l) { return l == 6; });
                           into += k.split_normalizer_witness.has_value();
                           sums.insert(std::accumulate(k.orbits.lengths.begin(), k.orbits.lengths.end(), std::size_t{0}));
                           orders.insert(k.order);
                       }
                       for (const auto& h : brute_force_subgroups(preimage_mod_p_squared(g, 3)).classes)
                           if (reduce_mod(h, 3) == g) oracle.insert(h.order());
                       c.info("classes", classes);
                       c.expect("class_count", 12, r.classes.size());
                       c.expect("all_orbits_6", 8, six);
                       c.expect("conjugate_into_ns9", 4, into);
                       c.expect("orbit_sums", json::array({12}), detail::sorted_json(sums));
                       c.expect("orders_vs_bruteforce", detail::sorted_json(oracle), detail::sorted_json(orders));
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step3.p3.lifts.index2"}, [](const Context&) {
                       Check c("step3.p3.lifts.index2", "lift",
                               "subgroups of GL2(Z/9) reducing onto an index-2 subgroup of N_s(3)");
                       auto g = derived_index_two_of_split_normalizer(3);
                       auto r = lift_subgroups(g, 3);
                       std::set<std::size_t> sums;
                       json classes = json::array();
                       for (const auto& k : r.classes) {
                           classes.push_back(lift_class_json(k));
                           sums.insert(std::accumulate(k.orbits.lengths.begin(), k.orbits.lengths.end(), std::size_t{0}));
                       }
                       c.info("group", group_json(g)).info("classes", classes).info("class_count", r.classes.size());
                       c.expect("orbit_sums", json::array({12}), detail::sorted_json(sums));
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step3.p3.kernel-orbits"},
                   [](const Context&) { return std::vector<CheckResult>{kernel_orbits("step3.p3.kernel-orbits", 3, 3)}; }});
    std::vector<CheckResult> lit = {
        literature("step3.p5.rational-isogeny", "rational 5-isogeny: rho is defined modulo 5 or 25",
                   "Greenberg, Theorem 2 (5-adic image and the index of the image)"),
        literature("step3.p5.xs25", "rational points of X_s(25) = X0+(5^4)",
                   "Momose-Shimura, Theorem 3.14: only cusps and CM points"),
        literature("step3.p3.level9", "rational 3-isogeny: <image, -I> has level at most 9 or is one level-27 group",
                   "Rouse-Sutherland-Zureick-Brown, Corollary 1.3.1 and Table 1"),
    };
    for (auto& r : lit) out.push_back({{r.id}, [r](const Context&) { return std::vector<CheckResult>{r}; }});
    return out;
}

inline std::vector<Task> step4() {
    std::vector<Task> out;
    out.push_back({{"step4.p2.kernel-orbits"},
                   [](const Context&) { return std::vector<CheckResult>{kernel_orbits("step4.p2.kernel-orbits", 2, 6)}; }});
    out.push_back({{"step4.p2.bound"}, [](const Context&) {
                       Check c("step4.p2.bound", "orbit", "largest k with 2^(k-4) <= 2");
                       int k = 4;
                       while ((1 << (k + 1 - 4)) <= 2) ++k;
                       c.expect("max_k", 5, k);
                       return std::vector<CheckResult>{c.done()};
                   }});
    auto lit = literature("step4.p2.defined-mod-32", "the 2-adic representation is defined modulo 32",
                          "Rouse-Zureick-Brown, Corollary 1.3");
    out.push_back({{lit.id}, [lit](const Context&) { return std::vector<CheckResult>{lit}; }});
    return out;
}

/// n = p^a q^b with 1 <= a <= amax, 1 <= b <= bmax not divisible by any excluded degree.
inline std::vector<std::uint64_t> mixed_degrees(std::uint64_t p, int amax, std::uint64_t q, int bmax,
                                                const std::vector<std::uint64_t>& excluded) {
    std::vector<std::uint64_t> out;
    std::uint64_t pa = 1;
    for (int a = 1; a <= amax; ++a) {
        pa *= p;
        std::uint64_t qb = 1;
        for (int b = 1; b <= bmax; ++b) {
            qb *= q;
            std::uint64_t n = pa * qb;
            if (std::none_of(excluded.begin(), excluded.end(), [n](std::uint64_t e) { return n % e == 0; }))
                out.push_back(n);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline CheckResult level27_orbits(const Context& ctx) {
    Check c("step5.level27.orbits", "orbit", "level-27 group and its index-2 subgroups without -I on cyclic 27-subgroups");
    const GeneratorSet* set = ctx.config.group("level27");
    if (!set) return c.indeterminate("level-27 generators not configured (groups.level27)");
    MatrixGroup g = group_closure(set->matrices, 27);
    const MatZmod minus = MatZmod::scalar(27, -1);
    c.info("group", group_json(g));
    c.expect("contains_minus_identity", true, g.contains(minus));
    auto o = cyclic_subgroup_orbits(g);
    c.expect("orbits", json({3, 6, 27}), o.lengths);
    json subs = json::array();
    for (const auto& h : index_two_subgroups(g)) {
        if (h.contains(minus)) continue;
        subs.push_back(cyclic_subgroup_orbits(h).lengths);
    }
    c.info("index2_without_minus_identity", subs.size());
    json want = json::array();
    for (std::size_t i = 0; i < subs.size(); ++i) want.push_back({3, 6, 27});
    c.expect("index2_orbits", want, subs);
    return c.done();
}

inline std::vector<Task> steps5to7() {
    std::vector<Task> out;
    struct Row {
        std::string id;
        std::uint64_t p;
        int amax;
        std::uint64_t q;
        int bmax;
        std::vector<std::uint64_t> excluded, expected;
    };
    for (const Row& row : {Row{"step5.n2a3b.degrees", 2, 5, 3, 2, {72, 48}, {6, 12, 18, 24, 36}},
                           Row{"step6.n2a5b.degrees", 2, 5, 5, 2, {50, 40}, {10, 20}},
                           Row{"step7.n3a5b.degrees", 3, 2, 5, 2, {45, 75}, {15}}}) {
        out.push_back({{row.id}, [row](const Context&) {
                           Check c(row.id, "orbit",
                                   "mixed degrees " + std::to_string(row.p) + "^a " + std::to_string(row.q) +
                                       "^b left after the exclusions");
                           c.info("excluded", row.excluded).info("a_max", row.amax).info("b_max", row.bmax);
                           c.expect("degrees", row.expected, mixed_degrees(row.p, row.amax, row.q, row.bmax, row.excluded));
                           return std::vector<CheckResult>{c.done()};
                       }});
    }
    out.push_back({{"step5.level27.orbits"}, [](const Context& ctx) { return std::vector<CheckResult>{level27_orbits(ctx)}; }});
    std::vector<CheckResult> lit = {
        literature("step5.x0-72", "quadratic points on X0(72)", "Ozman-Siksek, Table 8.13"),
        literature("step5.x0-48", "quadratic points on X0(48)",
                   "Bruin-Najman, Table 15: exceptional points are CM; hyperelliptic involution gives 12-isogenous pairs"),
        literature("step6.x0-50", "quadratic points on X0(50)",
                   "Bruin-Najman, Table 16: two CM points and four non-CM points without rational j"),
        literature("step6.x0-40", "quadratic points on X0(40)",
                   "Bruin-Najman, Table 11: exceptional points are CM; hyperelliptic involution gives 20-isogenous pairs"),
        literature("step7.x0-45", "quadratic points on X0(45)",
                   "Ozman-Siksek, Table 8.5: two CM points and four non-CM points without rational j"),
        literature("step7.x0-75", "quadratic points on X0(75)", "Ozman-Siksek, Table 8.14: no non-cuspidal non-CM points"),
    };
    for (auto& r : lit) out.push_back({{r.id}, [r](const Context&) { return std::vector<CheckResult>{r}; }});
    return out;
}

inline std::vector<Task> step8() {
    std::vector<Task> out;
    out.push_back({{"step8.deg14.curve", "step8.deg14.points"}, [](const Context&) {
                       Check curve("step8.deg14.curve", "curve", "jNs7(t) = (s + 16)^3 / s as a plane curve");
                       Check pts("step8.deg14.points", "curve", "the five listed points and their j-invariants");
                       JFamily j2 = builtin_family("j2iso");
                       BiPoly F = match_families(builtin_family("jNs7"), j2);
                       curve.expect("degree_t", 28, F.degree_t());
                       curve.expect("degree_s", 3, F.degree_s());
                       curve.expect("total_degree", 29, F.total_degree());
                       std::vector<ProjectivePoint> points = {{Rational(2), Rational(-256), Rational(1)},
                                                              {Rational(-1), Rational(-16), Rational(1)},
                                                              {Rational(0), Rational(-16), Rational(1)},
                                                              {Rational(0), Rational(1), Rational(0)},
                                                              {Rational(1), Rational(0), Rational(0)}};
                       json on = json::array(), js = json::array(), rows = json::array();
                       std::size_t infinite = 0;
                       for (const auto& r : verify_match_points(F, points, j2)) {
                           on.push_back(r.on_curve);
                           if (r.j) js.push_back(isogate::to_string(*r.j));
                           else ++infinite;
                           rows.push_back({{"point", r.point.to_string()},
                                           {"on_curve", r.on_curve},
                                           {"j", r.j ? json(isogate::to_string(*r.j)) : json(nullptr)},
                                           {"note", r.note}});
                       }
                       pts.info("points", rows);
                       pts.expect("on_curve", json(std::vector<bool>(5, true)), on);
                       pts.expect("affine_j", json({"54000", "0", "0"}), js);
                       pts.expect("without_j", 2, infinite);
                       return std::vector<CheckResult>{curve.done(), pts.done()};
                   }});
    std::vector<CheckResult> lit = {
        literature("step8.deg14.genus3", "all rational points of the degree-14 matching curve",
                   "map to a curve with an elliptic quotient having 6 rational points; preimages give the 5 listed points"),
        literature("step8.x0-30", "quadratic points on X0(30)",
                   "Bruin-Najman, Table 6: two CM points and four non-CM points without rational j; w15 pairs the rest"),
        literature("step8.x0-63", "quadratic points on X0(63)", "Ozman-Siksek, Table 8.11: no non-CM non-cuspidal points"),
    };
    for (auto& r : lit) out.push_back({{r.id}, [r](const Context&) { return std::vector<CheckResult>{r}; }});
    return out;
}

inline std::vector<Task> step9() {
    using namespace x091;
    std::vector<Task> out;
    out.push_back({{"step9.x091.model"}, [](const Context&) {
                       Check c("step9.x091.model", "curve", "the 10-quadric model of X0(91)");
                       const auto& m = canonical_model();
                       c.expect("quadrics", 10, m.size());
                       c.expect("round_trip", true, parse_model(m.to_string()).to_string() == m.to_string());
                       c.info("text_fnv1a", fnv1a_hex(m.to_string()));
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step9.x091.cusps"}, [](const Context&) {
                       Check c("step9.x091.cusps", "curve", "the four rational cusps satisfy every quadric");
                       json failing = json::array(), pts = json::array();
                       for (const auto& p : cusps()) {
                           pts.push_back(p.to_string());
                           failing.push_back(verify_model_point(canonical_model(), p).failing());
                       }
                       c.info("cusps", pts);
                       c.expect("failing_quadrics", json::array({json::array(), json::array(), json::array(), json::array()}),
                                failing);
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step9.x091.cm-points"}, [](const Context&) {
                       Check c("step9.x091.cm-points", "curve", "P and its conjugate over Q(sqrt 13) lie on the model");
                       ProjPoint p = cm_point();
                       c.info("P", p.to_string()).info("P_sigma", p.conjugate().to_string());
                       c.expect("failing_quadrics",
                                json::array({json::array(), json::array()}),
                                json::array({verify_model_point(canonical_model(), p).failing(),
                                             verify_model_point(canonical_model(), p.conjugate()).failing()}));
                       c.expect("distinct", true, !p.same_point(p.conjugate()));
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step9.x091.involution"}, [](const Context&) {
                       Check c("step9.x091.involution", "curve", "w91 on the model, the cusps and the CM pair");
                       c.expect("sign_pattern", "(+,+,+,+,+,-,+,+,-,-)",
                                sign_pattern_string(involution_consistency(canonical_model())));
                       auto cs = cusps();
                       json images = json::array();
                       for (const auto& q : cs) {
                           ProjPoint w = atkin_lehner(q);
                           int idx = -1;
                           for (std::size_t i = 0; i < cs.size(); ++i)
                               if (cs[i].same_point(w)) idx = static_cast<int>(i);
                           images.push_back(idx);
                       }
                       c.expect("cusp_images", json({1, 0, 3, 2}), images);
                       ProjPoint p = cm_point();
                       c.expect("fixes_P", true, atkin_lehner(p).same_point(p));
                       c.expect("fixes_P_sigma", true, atkin_lehner(p.conjugate()).same_point(p.conjugate()));
                       return std::vector<CheckResult>{c.done()};
                   }});
    out.push_back({{"step9.x091.quotient.mumford", "step9.x091.quotient.torsion", "step9.x091.quotient.zeta"},
                   [](const Context& ctx) {
                       const auto& C = quotient_curve();
                       Check zeta("step9.x091.quotient.zeta", "curve",
                                  "zeta data of " + C.to_string() + " at good odd primes");
                       Check mum("step9.x091.quotient.mumford", "curve", "Jacobian order against Mumford enumeration");
                       Check tor("step9.x091.quotient.torsion", "curve", "torsion multiple from Jacobian orders");
                       json rows = json::array();
                       std::vector<std::uint64_t> good, bad;
                       bool weil = true;
                       std::optional<std::uint64_t> n1_at_3;
                       for (std::uint64_t p = 3; p <= ctx.config.caps.zeta_max_prime; p = next_prime(p)) {
                           if (!is_good_reduction(C.integer_coeffs(), p)) {
                               bad.push_back(p);
                               continue;
                           }
                           good.push_back(p);
                           ZetaData z = jacobian_order(C, p);
                           Integer bound = sqrt(Integer(16 * p));
                           weil = weil && abs(z.c1) <= bound;
                           if (p == 3) n1_at_3 = z.n1;
                           rows.push_back({{"p", p}, {"N1", z.n1}, {"N2", z.n2}, {"c1", z.c1.get_str()},
                                           {"c2", z.c2.get_str()}, {"jacobian_order", z.jacobian_order.get_str()}});
                       }
                       zeta.info("primes", rows);
                       zeta.expect("bad_primes", json({7, 13}), bad);
                       zeta.expect("N1_at_3", 6, n1_at_3 ? json(*n1_at_3) : json(nullptr));
                       zeta.expect("weil_bound", true, weil);
                       json want = json::array(), got = json::array();
                       Integer g = 0;
                       for (std::uint64_t p : {3u, 5u}) {
                           Integer mo = mumford_jacobian_order(C, p);
                           g = igcd(g, mo);
                           want.push_back(mo.get_str());
                           got.push_back(jacobian_order(C, p).jacobian_order.get_str());
                       }
                       mum.expect("jacobian_orders_3_5", want, got);
                       tor.info("primes", good);
                       Integer t = torsion_multiple(C, good);
                       tor.info("torsion_multiple", t.get_str());
                       tor.expect("divides_mumford_gcd", true, g % t == 0);
                       tor.expect("torsion_multiple_3_5", g.get_str(), torsion_multiple(C, {3, 5}).get_str());
                       return std::vector<CheckResult>{mum.done(), tor.done(), zeta.done()};
                   }});
    std::vector<CheckResult> lit = {
        literature("step9.x091.mordell-weil", "group structure of J0(91)(Q)", literature::kMordellWeil),
        literature("step9.x091.rank", "rank of J0(91)(Q) and of the quotient Jacobian", literature::kRank),
        literature("step9.x091.torsion-bound", "torsion bound for J0(91)(Q) from reductions at 3, 5, 19",
                   literature::kTorsionBound),
        literature("step9.x091.chabauty", "quadratic points of X0(91)", literature::kChabauty),
    };
    for (auto& r : lit) out.push_back({{r.id}, [r](const Context&) { return std::vector<CheckResult>{r}; }});
    return out;
}

}  // namespace checks

inline const std::vector<Task>& registry() {
    static const std::vector<Task> tasks = [] {
        std::vector<Task> all;
        for (auto part : {checks::step1(), checks::step2(), checks::step3(), checks::step4(), checks::steps5to7(),
                          checks::step8(), checks::step9()})
            for (auto& t : part) all.push_back(std::move(t));
        std::set<std::string> seen;
        for (const auto& t : all)
            for (const auto& id : t.ids)
                if (!seen.insert(id).second) throw Error("internal: duplicate check id " + id);
        return all;
    }();
    return tasks;
}

inline std::vector<std::string> registered_ids() {
    std::vector<std::string> ids;
    for (const auto& t : registry()) ids.insert(ids.end(), t.ids.begin(), t.ids.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

// ---------------------------------------------------------------------------------------------
// Execution

struct RunOptions {
    std::string filter;       // id prefix; empty runs everything
    unsigned workers = 0;     // 0 = hardware concurrency
    bool timing = false;      // record wall time per check
};

inline bool matches(const std::string& id, const std::string& filter) { return id.compare(0, filter.size(), filter) == 0; }

inline RunReport run_checks(const Config& config, const RunOptions& opt = {}) {
    std::vector<const Task*> todo;
    for (const auto& t : registry())
        if (std::any_of(t.ids.begin(), t.ids.end(), [&](const std::string& id) { return matches(id, opt.filter); }))
            todo.push_back(&t);
    std::vector<std::vector<CheckResult>> slots(todo.size());
    Context ctx{config};
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
            const Task& t = *todo[i];
            auto start = std::chrono::steady_clock::now();
            try {
                slots[i] = t.run(ctx);
            } catch (const std::exception& e) {
                slots[i].clear();
                for (const auto& id : t.ids) {
                    CheckResult r;
                    r.id = id;
                    r.kind = "error";
                    r.title = "check raised an error";
                    r.status = Status::Fail;
                    r.diff = std::string("error: ") + e.what();
                    slots[i].push_back(std::move(r));
                }
            }
            if (opt.timing) {
                double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                for (auto& r : slots[i]) r.wall_ms = ms;
            }
        }
    };
    unsigned n = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(todo.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    RunReport rep;
    rep.config_digest = config.digest;
    rep.filter = opt.filter;
    for (auto& s : slots)
        for (auto& r : s)
            if (matches(r.id, opt.filter)) rep.results.push_back(std::move(r));
    std::sort(rep.results.begin(), rep.results.end(), [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
    return rep;
}

}  // namespace isogate::pipeline
