#include "isogate/pipeline.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace isogate;
using namespace isogate::pipeline;
using json = nlohmann::json;

namespace {

const std::string kSourceData = ISOGATE_DATA_DIR;
const std::string kBuildData = ISOGATE_BUILD_DATA_DIR;

Config build_config() { return load_config(kBuildData + "/isogate.json"); }

Config parse(const std::string& text) { return parse_config(json::parse(text), kSourceData); }

std::string config_error_pointer(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.pointer;
    }
    return "<no error>";
}

const RunReport& full_report() {
    static const RunReport rep = run_checks(build_config());
    return rep;
}

}  // namespace

TEST(Registry, CoversEveryStepWithWellFormedUniqueIds) {
    auto ids = registered_ids();
    std::set<std::string> unique(ids.begin(), ids.end());
    EXPECT_EQ(unique.size(), ids.size());
    const std::regex shape(R"(step[1-9]\.[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*)");
    std::set<int> steps;
    for (const auto& id : ids) {
        EXPECT_TRUE(std::regex_match(id, shape)) << id;
        steps.insert(id[4] - '0');
    }
    EXPECT_EQ(steps, (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
    for (const char* id : {"step1.q37.p7", "step1.q11.p2", "step2.p7.lifts", "step2.p7.modpoly", "step3.p5.lifts.ns",
                           "step3.p3.lifts", "step5.level27.orbits", "step8.deg14.points", "step9.x091.cm-points"})
        EXPECT_TRUE(unique.count(id)) << id;
}

TEST(Config, ParsesTheBuildConfig) {
    Config cfg = build_config();
    ASSERT_EQ(cfg.modpoly.size(), 2u);
    EXPECT_TRUE(std::filesystem::exists(cfg.modpoly.at(49)));
    ASSERT_NE(cfg.group("G3_5"), nullptr);
    EXPECT_EQ(cfg.group("G3_5")->modulus, 5u);
    EXPECT_EQ(cfg.group("G3_5")->matrices.size(), 2u);
    EXPECT_EQ(cfg.caps.modpoly_primes, 25);
    EXPECT_EQ(cfg.digest.size(), 16u);
    EXPECT_EQ(cfg.digest, build_config().digest);
    EXPECT_EQ(Config{}.digest, "none");
}

TEST(Config, RelativePathsResolveAgainstTheConfigDirectory) {
    Config cfg = parse(R"({"modpoly": {"2": "phi2.txt"}})");
    EXPECT_EQ(cfg.modpoly.at(2), (std::filesystem::path(kSourceData) / "phi2.txt").lexically_normal().string());
}

TEST(Config, ErrorsCarryAPointer) {
    EXPECT_EQ(config_error_pointer(R"({"groups": {"g": {"modulus": 5, "matrices": [[[1, 1], [1, 1]]]}}})"),
              "/groups/g/matrices/0");
    EXPECT_EQ(config_error_pointer(
                  R"({"groups": {"g": {"modulus": 5, "matrices": [{"modulus": 7, "rows": [[1, 0], [0, 1]]}]}}})"),
              "/groups/g/matrices/0/modulus");
    EXPECT_EQ(config_error_pointer(R"({"groups": {"level27": {"modulus": 9, "matrices": [[[1, 0], [0, 1]]]}}})"),
              "/groups/level27/modulus");
    EXPECT_EQ(config_error_pointer(R"({"groups": {"g": {"modulus": 5, "matrices": [[[1, 0]]]}}})"),
              "/groups/g/matrices/0");
    EXPECT_EQ(config_error_pointer(R"({"modpoly": {"49": "missing.txt"}})"), "/modpoly/49");
    EXPECT_EQ(config_error_pointer(R"({"modpoly": {"x": "phi2.txt"}})"), "/modpoly/x");
    EXPECT_EQ(config_error_pointer(R"({"prime_caps": {"zeta_max_prime": 2}})"), "/prime_caps/zeta_max_prime");
    EXPECT_EQ(config_error_pointer(R"({"prime_caps": {"other": 3}})"), "/prime_caps/other");
    EXPECT_EQ(config_error_pointer(R"({"extra": 1})"), "/extra");
    EXPECT_EQ(config_error_pointer(R"([1, 2])"), "");
    EXPECT_THROW(load_config(kSourceData + "/phi2.txt"), ConfigError);
    EXPECT_THROW(load_config(kSourceData + "/does-not-exist.json"), ConfigError);
}

TEST(Run, FullRunHasNoUnexpectedFailures) {
    const RunReport& rep = full_report();
    EXPECT_EQ(rep.results.size(), registered_ids().size());
    std::vector<std::string> failing;
    for (const auto& r : rep.results)
        if (r.status == Status::Fail) failing.push_back(r.id + ": " + r.diff);
    // The only failure is the exact factor-degree multiset of Phi_49 at the exceptional j.
    ASSERT_EQ(failing.size(), 1u) << ::testing::PrintToString(failing);
    EXPECT_EQ(failing[0].rfind("step2.p7.modpoly:", 0), 0u);
    EXPECT_EQ(rep.find("step2.p7.modpoly")->computed["degrees"], json({14, 21, 21}));
    EXPECT_EQ(rep.find("step2.p7.mindegree")->status, Status::Pass);
    EXPECT_EQ(rep.find("step5.level27.orbits")->status, Status::Indeterminate);
    EXPECT_TRUE(rep.failed());
    for (const auto& r : rep.results) {
        if (r.status == Status::Literature) EXPECT_FALSE(r.citation.empty()) << r.id;
        if (r.status == Status::Indeterminate) EXPECT_FALSE(r.reason.empty()) << r.id;
        EXPECT_FALSE(r.wall_ms.has_value());
    }
}

TEST(Run, ResultsAreSortedAndDeterministic) {
    const RunReport& rep = full_report();
    EXPECT_TRUE(std::is_sorted(rep.results.begin(), rep.results.end(),
                               [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; }));
    RunReport again = run_checks(build_config(), {.filter = "", .workers = 1});
    EXPECT_EQ(emit_json(rep), emit_json(again));
    EXPECT_EQ(emit_text(rep), emit_text(again));
}

TEST(Run, JsonRoundTrips) {
    const RunReport& rep = full_report();
    RunReport back = report_from_json(json::parse(emit_json(rep)));
    EXPECT_EQ(back, rep);
    RunReport timed = run_checks(Config{}, {.filter = "step4", .workers = 2, .timing = true});
    ASSERT_FALSE(timed.results.empty());
    EXPECT_TRUE(timed.results[0].wall_ms.has_value());
    EXPECT_EQ(report_from_json(json::parse(emit_json(timed))), timed);
    json broken = json::parse(emit_json(rep));
    broken["summary"]["fail"] = 0;
    EXPECT_THROW(report_from_json(broken), ParseError);
}

TEST(Run, FilterSelectsByPrefix) {
    RunReport rep = run_checks(Config{}, {.filter = "step1.q37"});
    ASSERT_FALSE(rep.results.empty());
    for (const auto& r : rep.results) EXPECT_EQ(r.id.rfind("step1.q37", 0), 0u);
    EXPECT_EQ(rep.summary().fail, 0u);
    RunReport none = run_checks(Config{}, {.filter = "step0"});
    EXPECT_EQ(none.summary(), Summary{});
    EXPECT_FALSE(none.failed());
    // A task emitting two ids reports only the one selected.
    RunReport one = run_checks(Config{}, {.filter = "step8.deg14.points"});
    ASSERT_EQ(one.results.size(), 1u);
    EXPECT_EQ(one.results[0].status, Status::Pass);
}

TEST(Run, MissingModularPolynomialIsIndeterminate) {
    RunReport rep = run_checks(Config{}, {.filter = "step2.p7.m"});
    ASSERT_EQ(rep.results.size(), 2u);
    for (const auto& r : rep.results) {
        EXPECT_EQ(r.status, Status::Indeterminate);
        EXPECT_NE(r.reason.find("modpoly.49"), std::string::npos);
    }
    EXPECT_FALSE(rep.failed());
}

TEST(Run, TaskErrorsBecomeFailures) {
    // Phi_2 registered under level 49 is rejected when loaded.
    Config cfg = parse(R"({"modpoly": {"49": "phi2.txt"}})");
    RunReport rep = run_checks(cfg, {.filter = "step2.p7.m"});
    ASSERT_EQ(rep.results.size(), 2u);
    for (const auto& r : rep.results) {
        EXPECT_EQ(r.status, Status::Fail);
        EXPECT_EQ(r.diff.rfind("error: ", 0), 0u);
    }
}

TEST(Run, Level27PathRunsWithConfiguredGenerators) {
    // A stand-in group: the Borel subgroup mod 27 contains -I but is not the level-27 image.
    Config cfg = parse(R"({"groups": {"level27": {"modulus": 27,
        "matrices": [[[2, 0], [0, 1]], [[1, 0], [0, 2]], [[1, 1], [0, 1]]]}}})");
    RunReport rep = run_checks(cfg, {.filter = "step5.level27"});
    ASSERT_EQ(rep.results.size(), 1u);
    const auto& r = rep.results[0];
    EXPECT_NE(r.status, Status::Indeterminate);
    EXPECT_EQ(r.computed["contains_minus_identity"], true);
    EXPECT_EQ(r.computed["group"]["order"], 18u * 18 * 27);
    EXPECT_TRUE(r.computed.contains("orbits"));
    EXPECT_TRUE(r.computed.contains("index2_orbits"));
}

TEST(Run, ConfiguredG3MatchesTheDerivedGroup) {
    auto from_config = group_closure(build_config().group("G3_5")->matrices, 5);
    auto derived = derived_index_two_of_split_normalizer(5);
    EXPECT_EQ(from_config.order(), 16u);
    EXPECT_TRUE(is_conjugate(from_config, derived));
    const auto& rep = full_report();
    EXPECT_NE(rep.find("step3.p5.lifts.g3")->title.find("config group G3_5"), std::string::npos);
    RunReport plain = run_checks(Config{}, {.filter = "step3.p5.lifts.g3"});
    EXPECT_EQ(plain.results[0].status, Status::Pass);
    EXPECT_EQ(plain.results[0].computed["class_count"], rep.find("step3.p5.lifts.g3")->computed["class_count"]);
}

TEST(Report, TextListsEveryCheckAndTheSummary) {
    const auto& rep = full_report();
    std::string text = emit_text(rep);
    for (const auto& r : rep.results) EXPECT_NE(text.find(r.id), std::string::npos) << r.id;
    Summary s = rep.summary();
    EXPECT_NE(text.find(std::to_string(s.total) + " checks: " + std::to_string(s.pass) + " pass, 1 fail"),
              std::string::npos);
}
