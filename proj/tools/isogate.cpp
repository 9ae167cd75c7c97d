// isogate command-line interface: the check pipeline plus direct access to the computational modules.

#include "isogate/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace isogate;
using json = nlohmann::json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json lift_report(const LiftResult& r, const std::string& target, const MatrixGroup& g) {
    json classes = json::array();
    for (const auto& c : r.classes) {
        json k = pipeline::lift_class_json(c);
        k["fingerprint"] = {{"element_orders", c.fingerprint.order_histogram},
                            {"scalar_order", c.fingerprint.scalar_order},
                            {"orbit_signature", c.fingerprint.orbit_signature}};
        json gens = json::array();
        for (const auto& x : small_generating_set(c.representative)) gens.push_back({x.a, x.b, x.c, x.d});
        k["generators"] = gens;
        classes.push_back(k);
    }
    json counts;
    for (auto o : {LiftOutcome::ScalarFail, LiftOutcome::ConjugateIntoSplitNormalizer, LiftOutcome::OrbitBound,
                   LiftOutcome::Unclassified})
        counts[to_string(o)] = r.count(o);
    return {{"prime", r.p},
            {"target", target},
            {"target_group", pipeline::group_json(g)},
            {"stable_subspaces", r.stable_subspace_count},
            {"raw_lifts", r.raw_lifts},
            {"class_count", r.classes.size()},
            {"outcomes", counts},
            {"classes", classes}};
}

int cmd_run(const std::string& config_path, const std::string& filter, const std::string& format,
            const std::string& out_path, unsigned workers, bool timing) {
    pipeline::Config cfg;
    if (!config_path.empty()) cfg = pipeline::load_config(config_path);
    auto rep = pipeline::run_checks(cfg, {.filter = filter, .workers = workers, .timing = timing});
    std::string doc = format == "json" ? pipeline::emit_json(rep) : pipeline::emit_text(rep);
    if (out_path.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error("cannot write '" + out_path + "'");
        out << doc;
        auto s = rep.summary();
        std::cerr << s.total << " checks: " << s.pass << " pass, " << s.fail << " fail, " << s.indeterminate
                  << " indeterminate, " << s.literature << " literature\n";
    }
    return rep.failed() ? kExitFail : 0;
}

int cmd_jmatch(const std::string& family, const std::string& constant) {
    JFamily fam = builtin_family(family);
    Rational c = parse_rational(constant);
    MatchOutcome m = match_constant(fam, c);
    json factors = json::array();
    for (const auto& f : m.factors) factors.push_back(f.factor.to_string());
    print({{"family", family},
           {"constant", isogate::to_string(c)},
           {"elimination", m.elimination.to_string()},
           {"elimination_degree", m.elimination.degree()},
           {"low_degree_factors", factors},
           {"verdict", to_string(m.verdict)},
           {"rational_roots", pipeline::detail::rationals(m.rational_roots)},
           {"quadratic_fields", pipeline::detail::integers(m.quadratic_fields)},
           {"eliminates", {{to_string(Requirement::NoDegreeLE2Root), eliminates(m, Requirement::NoDegreeLE2Root)},
                           {to_string(Requirement::NoRationalRoot), eliminates(m, Requirement::NoRationalRoot)}}}});
    return 0;
}

int cmd_lifts(unsigned prime, const std::string& target, const std::string& config_path) {
    MatrixGroup g;
    if (target == "ns") {
        g = standard_group("split_cartan_normalizer", prime);
    } else if (target.rfind("config:", 0) == 0) {
        if (config_path.empty()) throw Error("--target " + target + " needs --config");
        auto cfg = pipeline::load_config(config_path);
        const std::string name = target.substr(7);
        const auto* set = cfg.group(name);
        if (!set) throw Error("config has no group '" + name + "'");
        if (set->modulus != prime)
            throw Error("group '" + name + "' has modulus " + std::to_string(set->modulus) + ", expected " +
                        std::to_string(prime));
        g = group_closure(set->matrices, prime);
    } else {
        throw Error("unknown target '" + target + "' (use ns or config:NAME)");
    }
    print(lift_report(lift_subgroups(g, prime), target, g));
    return 0;
}

int cmd_modpoly(int level, const std::string& file, const std::string& j_text, int max_primes, bool factorize) {
    auto phi = load_modpoly(file, level);
    Rational j = parse_rational(j_text);
    auto w = isogeny_degree_witness(phi, j, max_primes, factorize ? Fallback::Factorize : Fallback::None);
    json cands = json::array();
    for (const auto& c : w.candidates) cands.push_back(c);
    json out = {{"level", level},
                {"j", isogate::to_string(j)},
                {"degree", w.specialized.poly.degree()},
                {"status", to_string(w.status)},
                {"method", w.method},
                {"primes", w.primes},
                {"candidates", cands}};
    if (w.status == WitnessStatus::Certified) {
        out["degrees"] = w.degrees;
        out["min_degree"] = w.min_degree;
    }
    if (w.gcd_witness) out["gcd_witness"] = w.gcd_witness->to_string();
    print(out);
    return 0;
}

int cmd_x091_model() {
    std::cout << x091::canonical_model().to_string();
    return 0;
}

int cmd_x091_points() {
    const auto& m = x091::canonical_model();
    json rows = json::array();
    auto add = [&](const std::string& label, const x091::ProjPoint& p) {
        auto r = x091::verify_model_point(m, p);
        rows.push_back({{"label", label},
                        {"point", p.to_string()},
                        {"field_discriminant", p.is_rational() ? json(nullptr) : json(p.field().get_str())},
                        {"on_model", r.on_model},
                        {"failing_quadrics", r.failing()},
                        {"w91_image", x091::atkin_lehner(p).to_string()}});
    };
    auto cs = x091::cusps();
    for (std::size_t i = 0; i < cs.size(); ++i) add("cusp" + std::to_string(i), cs[i]);
    add("P", x091::cm_point());
    add("P_sigma", x091::cm_point().conjugate());
    print({{"points", rows},
           {"involution_signs", x091::sign_pattern_string(x091::involution_consistency(m))}});
    return 0;
}

int cmd_x091_quotient(std::uint64_t p) {
    const auto& c = x091::quotient_curve();
    auto z = x091::jacobian_order(c, p);
    json out = {{"curve", c.to_string()},
                {"p", p},
                {"N1", z.n1},
                {"N2", z.n2},
                {"c1", z.c1.get_str()},
                {"c2", z.c2.get_str()},
                {"jacobian_order", z.jacobian_order.get_str()}};
    if (p <= 5) out["mumford_jacobian_order"] = x091::mumford_jacobian_order(c, p).get_str();
    print(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isogate: mechanical checks for isogeny degrees over quadratic fields"};
    app.set_version_flag("--version", std::string(pipeline::kVersion));
    app.require_subcommand(1);

    std::string config_path, filter, format = "json", out_path;
    unsigned workers = 0;
    bool timing = false;
    auto* run = app.add_subcommand("run", "run the check registry and emit a report");
    run->add_option("--filter", filter, "check id prefix");
    run->add_option("--config", config_path, "configuration JSON")->check(CLI::ExistingFile);
    run->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    run->add_option("--out", out_path, "write the report here instead of stdout");
    run->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
    run->add_flag("--timing", timing, "record wall time per check (makes reports run-dependent)");

    std::string family, constant;
    auto* jm = app.add_subcommand("jmatch", "match a j-family against a constant");
    jm->add_option("--family", family, "family name")->required()->check(CLI::IsMember(builtin_family_names()));
    jm->add_option("--constant", constant, "rational constant num/den")->required();

    unsigned prime = 0;
    std::string target;
    auto* lf = app.add_subcommand("lifts", "classify subgroups of GL2(Z/p^2) reducing onto a mod-p group");
    lf->add_option("--prime", prime, "p")->required()->check(CLI::IsMember({3u, 5u, 7u}));
    lf->add_option("--target", target, "ns or config:NAME")->required();
    lf->add_option("--config", config_path, "configuration JSON for config:NAME")->check(CLI::ExistingFile);

    int level = 0, max_primes = 25;
    std::string file, j_text;
    bool no_fallback = false;
    auto* mp = app.add_subcommand("modpoly", "certify factor degrees of Phi_N(X, j)");
    mp->add_option("--level", level, "N")->required();
    mp->add_option("--file", file, "modular polynomial file")->required()->check(CLI::ExistingFile);
    mp->add_option("--j", j_text, "rational j num/den")->required();
    mp->add_option("--max-primes", max_primes, "pattern primes before falling back");
    mp->add_flag("--no-fallback", no_fallback, "report Indeterminate instead of factoring over Q");

    std::uint64_t qprime = 0;
    auto* x = app.add_subcommand("x091", "the X0(91) model and the genus-2 quotient");
    x->require_subcommand(1);
    auto* xm = x->add_subcommand("model", "print the 10 quadrics");
    auto* xp = x->add_subcommand("points", "verify the cusps and the CM pair");
    auto* xq = x->add_subcommand("quotient", "zeta data of the quotient curve at p");
    xq->add_option("--prime", qprime, "odd prime of good reduction")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, filter, format, out_path, workers, timing);
        if (*jm) return cmd_jmatch(family, constant);
        if (*lf) return cmd_lifts(prime, target, config_path);
        if (*mp) return cmd_modpoly(level, file, j_text, max_primes, !no_fallback);
        if (*xm) return cmd_x091_model();
        if (*xp) return cmd_x091_points();
        if (*xq) return cmd_x091_quotient(qprime);
    } catch (const std::exception& e) {
        std::cerr << "isogate: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
