#include "pwbench/error.hpp"
#include "pwbench/prince.hpp"
#include "pwbench/random.hpp"

#include <doctest.h>

#include <set>

using namespace pwbench;

namespace {

std::vector<PasswordRecord> recs(std::initializer_list<const char*> texts) {
    std::vector<PasswordRecord> out;
    for (const char* t : texts) out.push_back({t, 1});
    return out;
}

std::vector<std::string> drain(const LengthIndex& index, std::size_t lo, std::size_t hi, std::size_t max_elems) {
    ChainEnumerator it(index, lo, hi, max_elems);
    std::vector<std::string> out;
    std::string s;
    while (it.next(s)) out.push_back(s);
    return out;
}

// Every sequence of 1..max_elems words (with repetition) whose joined length is in the window.
std::multiset<std::string> brute_force(const std::vector<std::string>& words, std::size_t lo, std::size_t hi, std::size_t max_elems) {
    std::multiset<std::string> out;
    std::vector<std::string> layer{""};
    for (std::size_t k = 1; k <= max_elems; ++k) {
        std::vector<std::string> next;
        for (const auto& prefix : layer) {
            for (const auto& w : words) {
                const auto s = prefix + w;
                if (s.size() > hi) continue;
                next.push_back(s);
                if (s.size() >= lo) out.insert(s);
            }
        }
        layer = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("length index") {
    const auto index = build_length_index(recs({"ab", "cd", "xyz"}));
    REQUIRE(index.size() == 2);
    CHECK(index.at(2) == std::vector<std::string>{"ab", "cd"});
    CHECK(index.at(3) == std::vector<std::string>{"xyz"});
    CHECK(build_length_index({}).empty());
    CHECK(build_length_index(recs({"ab", "ab"})).at(2).size() == 1);
}

TEST_CASE("chain examples") {
    const auto index = build_length_index(recs({"ab", "cd"}));
    const auto four = drain(index, 4, 4, 2);
    CHECK(std::set<std::string>(four.begin(), four.end()) == std::set<std::string>{"abab", "abcd", "cdab", "cdcd"});
    CHECK(four.size() == 4);
    CHECK(chain_keyspace(index, 4, 4, 2) == 4);
    CHECK(drain(index, 2, 2, 1) == std::vector<std::string>{"ab", "cd"});
    CHECK(drain(index, 5, 5, 8).empty());
    CHECK(chain_keyspace(index, 5, 5, 8) == 0);
    CHECK(chain_keyspace(build_length_index({}), 4, 12, 8) == 0);
    CHECK(chain_keyspace(build_length_index(recs({"ab"})), 4, 4, 2) == 1);
    CHECK_THROWS_AS(chain_keyspace(index, 5, 4, 2), DataError);
    CHECK_THROWS_AS(chain_keyspace(index, 4, 5, 0), DataError);
}

TEST_CASE("specs are ordered by keyspace") {
    const auto index = build_length_index(recs({"a", "b", "c", "dd", "eee"}));
    const auto specs = chain_specs(index, 2, 5, 4);
    for (std::size_t i = 1; i < specs.size(); ++i) CHECK(specs[i - 1].keyspace <= specs[i].keyspace);
}

TEST_CASE("enumeration equals brute force and keyspace on random toy inputs") {
    Prng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<PasswordRecord> words;
        const auto n = 1 + rng.below(5);
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string w;
            const auto len = 1 + rng.below(3);
            for (std::uint64_t j = 0; j < len; ++j) w += static_cast<char>('a' + rng.below(3));
            words.push_back({w, 1});
        }
        const auto index = build_length_index(words);
        std::vector<std::string> unique;
        for (const auto& [len, bucket] : index) unique.insert(unique.end(), bucket.begin(), bucket.end());
        const std::size_t lo = 1 + rng.below(4);
        const std::size_t hi = lo + rng.below(4);
        const std::size_t max_elems = 1 + rng.below(4);
        const auto got = drain(index, lo, hi, max_elems);
        CHECK(std::multiset<std::string>(got.begin(), got.end()) == brute_force(unique, lo, hi, max_elems));
        CHECK(Keyspace(got.size()) == chain_keyspace(index, lo, hi, max_elems));
    }
}

TEST_CASE("keyspace does not overflow") {
    std::vector<PasswordRecord> words;
    for (int i = 0; i < 1000; ++i) words.push_back({"w" + std::to_string(1000 + i).substr(1), 1});
    // 1000 words of length 4; chains of 8 such words reach 1000^8 = 1e24 > 2^64.
    const auto index = build_length_index(words);
    CHECK(chain_keyspace(index, 32, 32, 8) == Keyspace("1000000000000000000000000"));
}
