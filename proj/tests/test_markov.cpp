#include "pwbench/markov.hpp"
#include "pwbench/random.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace pwbench;

namespace {

NgramModel model_of(std::initializer_list<const char*> texts, unsigned k, double alpha = 0.0, std::size_t max_len = 12) {
    std::vector<PasswordRecord> records;
    for (const char* t : texts) records.push_back({t, 1});
    return train_ngram(records, k, alpha, max_len);
}

std::vector<ScoredCandidate> drain(NgramEnumerator& it) {
    std::vector<ScoredCandidate> out;
    while (auto c = it.next()) out.push_back(*c);
    return out;
}

}  // namespace

TEST_CASE("bigram probabilities of {aa}") {
    const auto m = model_of({"aa"}, 2);
    const auto& start = m.table(m.context_after(""));
    CHECK(start.probability_of('a') == 1.0);
    const auto& after_a = m.table(m.context_after("a"));
    CHECK(after_a.probability_of('a') == 0.5);
    CHECK(after_a.probability_of(kEos) == 0.5);
}

TEST_CASE("ngram_prob examples") {
    const auto m = model_of({"ab", "ac"}, 2);
    CHECK(ngram_prob(m, "ab") == 0.5);
    CHECK(ngram_prob(m, "ac") == 0.5);
    CHECK(ngram_prob(m, "zz") == 0.0);
    CHECK(ngram_prob(m, "a") == 0.0);
}

TEST_CASE("empty model generates nothing") {
    const auto m = train_ngram({}, 2);
    NgramEnumerator it(m);
    CHECK_FALSE(it.next().has_value());
    CHECK(ngram_prob(m, "a") == 0.0);
}

TEST_CASE("enumerate examples") {
    {
        // At k=3 the whole of "aa" is determined by its context.
        const auto m = model_of({"aa"}, 3);
        NgramEnumerator it(m);
        const auto c = it.next();
        REQUIRE(c);
        CHECK(c->text == "aa");
        CHECK(c->probability == 1.0);
        CHECK_FALSE(it.next());
    }
    {
        // At k=2 "a" outranks "aa".
        const auto m = model_of({"aa"}, 2);
        NgramEnumerator it(m, 2);
        const auto all = drain(it);
        REQUIRE(all.size() == 2);
        CHECK(all[0].text == "a");
        CHECK(all[1].text == "aa");
    }
    {
        const auto m = model_of({"ab", "ab", "ac"}, 2);
        NgramEnumerator it(m);
        const auto all = drain(it);
        REQUIRE(all.size() == 2);
        CHECK(all[0].text == "ab");
        CHECK(all[1].text == "ac");
    }
}

TEST_CASE("max_len bounds enumeration and scoring") {
    const auto m = model_of({"aa"}, 2, 0.0, 3);
    NgramEnumerator it(m);
    for (const auto& c : drain(it)) CHECK(c.text.size() <= 3);
    CHECK(ngram_prob(m, "aaaa") == 0.0);
    CHECK(ngram_prob(m, "aaa") == 0.125);
}

TEST_CASE("mass within max_len plus overflow equals one") {
    // {aa} at k=2: P(a^n) = 0.5^(n-1) * 0.5 for n >= 1; overflow past max_len is 0.5^max_len.
    const std::size_t max_len = 6;
    const auto m = model_of({"aa"}, 2, 0.0, max_len);
    double mass = 0.0;
    for (const auto& s : pwtest::all_strings("a", max_len)) mass += ngram_prob(m, s);
    CHECK(mass + std::pow(0.5, static_cast<double>(max_len)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration matches the brute-force ranking on small random corpora") {
    Prng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<PasswordRecord> records;
        const auto n = 1 + rng.below(6);
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string pw;
            const auto len = 1 + rng.below(4);
            for (std::uint64_t j = 0; j < len; ++j) pw += "xyz"[rng.below(3)];
            records.push_back({pw, 1});
        }
        const double alpha = trial % 3 == 0 ? 0.5 : 0.0;
        const auto m = train_ngram(records, 2 + trial % 2, alpha, 4);
        NgramEnumerator it(m);
        const auto got = drain(it);
        const auto want = pwtest::brute_force_ngram(m);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].text == want[i].text);
            CHECK(got[i].probability == want[i].probability);
        }
        // A limited run returns the same prefix.
        NgramEnumerator top(m, 5);
        const auto first = drain(top);
        REQUIRE(first.size() == std::min<std::size_t>(5, want.size()));
        for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].text == want[i].text);
    }
}

TEST_CASE("per-context distributions sum to one") {
    const auto m = model_of({"password", "pass123", "letmein", "abc"}, 3, 0.1);
    for (const auto& [context, _] : m.counts()) {
        double sum = 0.0;
        for (const auto& t : m.table(context).transitions) sum += t.probability;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("sampling") {
    {
        const auto m = model_of({"aa"}, 3);
        NgramSampler s(m, 1);
        for (int i = 0; i < 1000; ++i) CHECK(s.next() == "aa");
    }
    const auto m = model_of({"ab", "ac"}, 2);
    NgramSampler a(m, 17), b(m, 17);
    int ab = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        ab += x == "ab";
    }
    CHECK(std::abs(static_cast<double>(ab) / n - 0.5) <= 0.01);
}

TEST_CASE("sampler stream equals its blocks") {
    const auto m = model_of({"ab", "ac", "bca"}, 2);
    NgramSampler s(m, 5);
    std::vector<std::string> stream;
    for (std::size_t i = 0; i < 2 * kSampleBlock; ++i) stream.push_back(s.next());
    auto b0 = s.block(0);
    const auto b1 = s.block(1);
    b0.insert(b0.end(), b1.begin(), b1.end());
    CHECK(stream == b0);
}

TEST_CASE("save and load round trip") {
    const auto m = model_of({"pa\\ss", "word", "p@ss"}, 3, 0.25, 10);
    std::stringstream io;
    m.save(io);
    const auto back = NgramModel::load(io);
    CHECK(back.order() == 3);
    CHECK(back.alpha() == 0.25);
    CHECK(back.max_len() == 10);
    for (const char* s : {"pa\\ss", "word", "p@ss", "pass", "wo"}) CHECK(ngram_prob(back, s) == ngram_prob(m, s));
    std::stringstream again;
    back.save(again);
    io.clear();
    io.seekg(0);
    CHECK(again.str() == io.str());
}
