#include "pwbench/error.hpp"
#include "pwbench/pcfg.hpp"
#include "pwbench/random.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace pwbench;

namespace {

StructureModel model_of(std::initializer_list<const char*> texts) {
    std::vector<PasswordRecord> records;
    for (const char* t : texts) records.push_back({t, 1});
    return train_structure(records);
}

std::vector<ScoredCandidate> drain(StructureEnumerator& it) {
    std::vector<ScoredCandidate> out;
    while (auto c = it.next()) out.push_back(*c);
    return out;
}

double terminal_prob(const StructureModel& m, CharClass cls, std::size_t len, const std::string& text) {
    const auto* list = m.terminals({cls, len});
    REQUIRE(list != nullptr);
    return list->items[list->index.at(text)].probability;
}

}  // namespace

TEST_CASE("training counts") {
    const auto m = model_of({"ab1", "cd2", "ab2"});
    REQUIRE(m.templates().size() == 1);
    CHECK(m.templates()[0].pattern.render() == "L2D1");
    CHECK(m.templates()[0].probability == 1.0);
    CHECK(terminal_prob(m, CharClass::Letter, 2, "ab") == 2.0 / 3.0);
    CHECK(terminal_prob(m, CharClass::Letter, 2, "cd") == 1.0 / 3.0);
    CHECK(terminal_prob(m, CharClass::Digit, 1, "2") == 2.0 / 3.0);
    CHECK(terminal_prob(m, CharClass::Digit, 1, "1") == 1.0 / 3.0);
}

TEST_CASE("single password model") {
    const auto m = model_of({"x"});
    REQUIRE(m.templates().size() == 1);
    CHECK(m.templates()[0].pattern.render() == "L1");
    CHECK(structure_prob(m, "x") == 1.0);
    StructureEnumerator it(m);
    const auto all = drain(it);
    REQUIRE(all.size() == 1);
    CHECK(all[0].text == "x");
    StructureSampler s(m, 4);
    for (int i = 0; i < 100; ++i) CHECK(s.next() == "x");
}

TEST_CASE("weights are equivalent to repetition") {
    const auto weighted = train_structure({{"ab1", 2}});
    const auto repeated = model_of({"ab1", "ab1"});
    std::ostringstream a1, a2, b1, b2;
    weighted.save_templates(a1);
    weighted.save_terminals(a2);
    repeated.save_templates(b1);
    repeated.save_terminals(b2);
    CHECK(a1.str() == b1.str());
    CHECK(a2.str() == b2.str());
}

TEST_CASE("structure_prob examples") {
    const auto m = model_of({"ab1", "cd2", "ab2"});
    CHECK(structure_prob(m, "ab2") == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    CHECK(structure_prob(m, "cd1") == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(structure_prob(m, "abc!") == 0.0);
    CHECK(structure_prob(m, "zz1") == 0.0);
}

TEST_CASE("enumeration order of the worked example") {
    const auto m = model_of({"ab1", "cd2", "ab2"});
    StructureEnumerator it(m);
    const auto all = drain(it);
    REQUIRE(all.size() == 4);
    CHECK(all[0].text == "ab2");
    CHECK(all[1].text == "ab1");
    CHECK(all[2].text == "cd2");
    CHECK(all[3].text == "cd1");
    CHECK(all[1].probability == all[2].probability);
}

TEST_CASE("enumeration matches brute force on random toy models") {
    Prng rng(2024);
    int checked = 0;
    while (checked < 25) {
        std::vector<std::string> training;
        const auto n = 1 + rng.below(8);
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string pw;
            const auto len = 1 + rng.below(4);
            for (std::uint64_t j = 0; j < len; ++j) pw += "abA12!"[rng.below(6)];
            training.push_back(pw);
        }
        const auto want = pwtest::brute_force_structure(training);
        if (want.size() > 1000) continue;
        ++checked;
        const auto m = train_structure(pwtest::as_records(training));
        StructureEnumerator it(m);
        const auto got = drain(it);
        REQUIRE(got.size() == want.size());
        double mass = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].text == want[i].text);
            CHECK(got[i].probability == want[i].probability);
            CHECK(structure_prob(m, got[i].text) == want[i].probability);
            mass += got[i].probability;
        }
        CHECK(std::abs(mass - 1.0) <= 1e-9);
    }
}

TEST_CASE("frontier cap fails fast") {
    const auto m = model_of({"ab12", "cd34", "ef56", "gh78", "ij90"});
    StructureEnumerator it(m, 0, 2);
    CHECK_THROWS_AS(drain(it), ResourceLimitError);
}

TEST_CASE("sampling frequencies track structure_prob") {
    const auto m = model_of({"ab1", "cd2", "ab2", "x!", "ab1"});
    StructureSampler a(m, 9), b(m, 9);
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto s = a.next();
        CHECK(s == b.next());
        ++counts[s];
    }
    StructureEnumerator it(m);
    for (const auto& c : drain(it)) {
        const double p = c.probability;
        const double sigma = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(counts[c.text] / static_cast<double>(n) - p) <= 3 * sigma);
        counts.erase(c.text);
    }
    CHECK(counts.empty());
}

TEST_CASE("save and load round trip") {
    const auto m = model_of({"Pass12", "word!", "abc", "12ab"});
    std::stringstream templates, terminals;
    m.save_templates(templates);
    m.save_terminals(terminals);
    const auto back = StructureModel::load(templates, terminals);
    for (const char* s : {"Pass12", "word!", "abc", "12ab", "word12"}) CHECK(structure_prob(back, s) == structure_prob(m, s));
    std::istringstream bad_templates("L3\t1\n"), empty_terminals("");
    CHECK_THROWS_AS(StructureModel::load(bad_templates, empty_terminals), DataError);
}

TEST_CASE("empty training set is an error") {
    CHECK_THROWS_AS(train_structure({}), DataError);
}
