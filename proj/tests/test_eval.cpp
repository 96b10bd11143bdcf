#include "pwbench/error.hpp"
#include "pwbench/eval.hpp"
#include "pwbench/io.hpp"
#include "pwbench/random.hpp"
#include "pwbench/string_set.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace pwbench;

namespace {

std::vector<PasswordRecord> recs(const std::vector<std::string>& texts) {
    std::vector<PasswordRecord> out;
    for (const auto& t : texts) out.push_back({t, 1});
    return out;
}

RuleSet ruleset(const std::string& text) {
    std::istringstream in(text);
    return RuleSet::parse(in, "test");
}

std::vector<std::string> random_strings(Prng& rng, std::size_t n, std::uint64_t space) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("s" + std::to_string(rng.below(space)));
    return out;
}

}  // namespace

TEST_CASE("string set agrees with std::set") {
    Prng rng(1);
    StringSet set;
    std::set<std::string> oracle;
    for (int i = 0; i < 10000; ++i) {
        auto s = "k" + std::to_string(rng.below(5000));
        if (rng.below(50) == 0) s = std::string(400000, 'x') + s;  // oversized entries
        CHECK(set.insert(s) == oracle.insert(s).second);
    }
    CHECK(set.size() == oracle.size());
    for (int i = 0; i < 10000; ++i) {
        const auto s = "k" + std::to_string(rng.below(10000));
        CHECK(set.contains(s) == (oracle.count(s) == 1));
    }
    StringSet capped(3);
    capped.insert("a");
    capped.insert("b");
    capped.insert("c");
    CHECK_FALSE(capped.insert("a"));
    CHECK_THROWS_AS(capped.insert("d"), ResourceLimitError);
}

TEST_CASE("matcher") {
    const auto m = build_matcher(recs({"b", "c", "d", "d"}));
    CHECK(m.size() == 3);
    CHECK(m.contains("b"));
    CHECK_FALSE(m.contains("a"));
}

TEST_CASE("match_stream example") {
    const auto m = build_matcher(recs({"b", "c", "d"}));
    const std::vector<std::string> candidates{"a", "b", "c"};
    const auto ledger = match_stream(vector_source(candidates), m, {{3}});
    REQUIRE(ledger.rows.size() == 1);
    CHECK(ledger.rows[0].generated == 3);
    CHECK(ledger.rows[0].unique == 3);
    CHECK(ledger.rows[0].matched == 2);
    CHECK(ledger.fraction(ledger.rows[0]) == "0.666667");
    CHECK(ledger.test_size == 3);
}

TEST_CASE("candidates equal to the test set recover all of it") {
    const std::vector<std::string> test{"p1", "p2", "p3", "p4"};
    const auto ledger = match_stream(vector_source(test), build_matcher(recs(test)), {{4}});
    CHECK(ledger.rows.back().matched == 4);
}

TEST_CASE("short streams end with a final row") {
    const std::vector<std::string> candidates{"a", "a", "b"};
    const auto ledger = match_stream(vector_source(candidates), build_matcher(recs({"a"})), {{2, 10, 100}});
    REQUIRE(ledger.rows.size() == 2);
    CHECK(ledger.rows[0].generated == 2);
    CHECK(ledger.rows[0].unique == 1);
    CHECK_FALSE(ledger.rows[0].final);
    CHECK(ledger.rows[1].generated == 3);
    CHECK(ledger.rows[1].unique == 2);
    CHECK(ledger.rows[1].final);
}

TEST_CASE("checkpoints must increase") {
    const std::vector<std::string> c{"a"};
    CHECK_THROWS_AS(match_stream(vector_source(c), build_matcher(recs({"a"})), {{10, 10}}), DataError);
}

TEST_CASE("match_stream agrees with brute force at every checkpoint") {
    Prng rng(31);
    const std::vector<std::uint64_t> checkpoints{10, 100, 1000, 5000, 10000};
    for (int trial = 0; trial < 10; ++trial) {
        const auto candidates = random_strings(rng, 10000, 20000);
        const auto test = random_strings(rng, 1000, 20000);
        std::vector<std::string> matched;
        const auto ledger = match_stream(vector_source(candidates), build_matcher(recs(test)), {checkpoints}, &matched);
        REQUIRE(ledger.rows.size() == checkpoints.size());
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
            const auto want = pwtest::brute_force_match(candidates, checkpoints[i], test);
            CHECK(ledger.rows[i].generated == want.generated);
            CHECK(ledger.rows[i].unique == want.unique);
            CHECK(ledger.rows[i].matched == want.matched);
        }
        CHECK(matched.size() == ledger.rows.back().matched);
    }
}

TEST_CASE("partitioned matching equals in-memory matching") {
    Prng rng(32);
    const auto dir = std::filesystem::temp_directory_path() / "pwbench_eval_partition";
    std::filesystem::create_directories(dir);
    const auto test_path = (dir / "test.txt").string();
    const auto candidates = random_strings(rng, 10000, 5000);
    const auto test = random_strings(rng, 1000, 5000);
    {
        std::ofstream f(test_path);
        for (const auto& t : test) f << t << '\n';
    }
    const MatchOptions options{{100, 1000, 10000}};
    std::vector<std::string> a_matched, b_matched;
    const auto a = match_stream(vector_source(candidates), build_matcher(recs(test)), options, &a_matched);
    const auto b = match_stream_partitioned(vector_source(candidates), test_path, options, 7, dir.string(), &b_matched);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].generated == b.rows[i].generated);
        CHECK(a.rows[i].unique == b.rows[i].unique);
        CHECK(a.rows[i].matched == b.rows[i].matched);
    }
    CHECK(a.test_size == b.test_size);
    CHECK(std::set<std::string>(a_matched.begin(), a_matched.end()) == std::set<std::string>(b_matched.begin(), b_matched.end()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("ledger output formats") {
    const std::vector<std::string> c{"a", "b", "c"};
    const auto ledger = match_stream(vector_source(c), build_matcher(recs({"b", "c", "d"})), {{1, 3}});
    std::ostringstream tsv, json;
    ledger.write_tsv(tsv);
    CHECK(tsv.str() == "generated\tunique\tmatched\tmatched_fraction\n1\t1\t0\t0.000000\n3\t3\t2\t0.666667\n");
    ledger.write_json(json);
    CHECK(json.str().find("\"test_size\"") != std::string::npos);
}

TEST_CASE("rule-augmented matching") {
    const std::vector<std::string> pass{"pass"};
    auto report = rule_augmented_match(vector_source(pass), ruleset("$1\n"), build_matcher(recs({"pass1"})));
    CHECK(report.matched == 0);
    CHECK(report.rules_matched == 1);

    const std::vector<std::string> candidates{"a", "b", "a", "c"};
    const auto matcher = build_matcher(recs({"a", "c", "z"}));
    report = rule_augmented_match(vector_source(candidates), ruleset(""), matcher);
    CHECK(report.rules_matched == report.matched);
    report = rule_augmented_match(vector_source(candidates), ruleset(":\n"), matcher);
    CHECK(report.generated == 4);
    CHECK(report.unique == 3);
    CHECK(report.rules_unique == report.unique);
    CHECK(report.rules_matched == report.matched);
    CHECK(report.matched == 2);
}

TEST_CASE("intersections") {
    auto report = intersections({{"A", {"1", "2"}}, {"B", {"2", "3"}}});
    CHECK(report.regions[0b01] == 1);
    CHECK(report.regions[0b10] == 1);
    CHECK(report.regions[0b11] == 1);
    CHECK(report.union_size == 3);

    report = intersections({{"A", {"x", "y"}}, {"B", {"y", "x"}}, {"C", {"x", "y", "x"}}});
    for (std::size_t mask = 1; mask < 7; ++mask) CHECK(report.regions[mask] == 0);
    CHECK(report.regions[7] == 2);

    CHECK_THROWS_AS(intersections({{"A", {"1"}}}), DataError);
    std::vector<LabeledSet> seven(7, LabeledSet{"x", {"1"}});
    CHECK_THROWS_AS(intersections(seven), DataError);

    std::ostringstream tsv;
    intersections({{"A", {"1", "2"}}, {"B", {"2", "3"}}}).write_tsv(tsv);
    CHECK(tsv.str() == "region\tcount\n10\t1\n01\t1\n11\t1\n");
}

TEST_CASE("intersections agree with membership bucketing") {
    Prng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<LabeledSet> sets;
        std::vector<std::vector<std::string>> raw;
        for (int k = 0; k < 4; ++k) {
            raw.push_back(random_strings(rng, 1000, 3000));
            sets.push_back({std::string(1, static_cast<char>('A' + k)), raw.back()});
        }
        const auto report = intersections(sets);
        CHECK(report.regions == pwtest::brute_force_regions(raw));
        std::uint64_t sum = 0;
        for (std::size_t mask = 1; mask < report.regions.size(); ++mask) sum += report.regions[mask];
        CHECK(sum == report.union_size);
    }
}

TEST_CASE("top_frequency") {
    std::vector<std::string> c{"a", "a", "b", "c"};
    auto top = top_frequency(vector_source(c));
    CHECK(top.text == "a");
    CHECK(top.count == 2);
    CHECK(top.relative() == 0.5);

    c = {"z", "y", "x"};
    top = top_frequency(vector_source(c));
    CHECK(top.text == "x");
    CHECK(top.count == 1);
    CHECK(top.total == 3);

    c.clear();
    CHECK_THROWS_AS(top_frequency(vector_source(c)), DataError);
}

TEST_CASE("stats_report") {
    const auto vocab = build_vocab({{"password", 1}}, 10);
    const std::vector<std::string> one{"password!23"};
    auto report = stats_report(vector_source(one), {{"password!23", 1}}, vocab);
    CHECK(report.pattern.candidates.counts.at("L8S1D2") == 1);
    CHECK(report.pattern.candidates.fraction("L8S1D2") == "1.000000");
    CHECK(report.pattern.l1() == 0.0);
    CHECK(report.signature.l1() == 0.0);
    CHECK(report.segments.l1() == 0.0);

    const std::vector<std::string> letters{"abc", "de"};
    report = stats_report(vector_source(letters), {{"123", 2}, {"99", 1}}, vocab);
    CHECK(report.pattern.l1() == 2.0);
    CHECK(report.pattern.l1_text() == "2.000000");

    const std::vector<std::string> mixed{"ab", "ab", "12", "\x01"};
    report = stats_report(vector_source(mixed), {{"ab", 1}, {"12", 1}}, vocab);
    CHECK(report.skipped == 1);
    // candidates L2: 2/3, D2: 1/3; reference 1/2 each.
    CHECK(report.pattern.l1_text() == "0.333333");
}
