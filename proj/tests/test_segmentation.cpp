#include "pwbench/random.hpp"
#include "pwbench/segmentation.hpp"

#include <doctest.h>

#include <sstream>
#include <stdexcept>

using namespace pwbench;

namespace {

std::string render(const std::vector<Segment>& segments) {
    std::string out;
    for (const auto& s : segments) {
        if (!out.empty()) out += ' ';
        out += s.text + '/' + class_symbol(s.cls);
    }
    return out;
}

std::vector<PasswordRecord> recs(std::initializer_list<const char*> texts) {
    std::vector<PasswordRecord> out;
    for (const char* t : texts) out.push_back({t, 1});
    return out;
}

std::vector<std::string> texts(const std::vector<std::uint32_t>& ranks, const SegmentVocab& vocab) {
    std::vector<std::string> out;
    for (auto r : ranks) out.push_back(vocab.tokens()[r].text);
    return out;
}

}  // namespace

TEST_CASE("char_class") {
    CHECK(char_class('a') == CharClass::Letter);
    CHECK(char_class('Z') == CharClass::Letter);
    CHECK(char_class('7') == CharClass::Digit);
    CHECK(char_class('!') == CharClass::Special);
    CHECK(char_class('_') == CharClass::Special);
    CHECK(char_class(' ') == CharClass::Special);
    CHECK_THROWS_AS(char_class('\n'), std::invalid_argument);
    CHECK_THROWS_AS(char_class('\x7f'), std::invalid_argument);
}

TEST_CASE("split_segments") {
    CHECK(render(split_segments("pass_word!!123")) == "pass/L _/S word/L !!/S 123/D");
    CHECK(render(split_segments("aaaa")) == "aaaa/L");
    CHECK(render(split_segments("a1a1")) == "a/L 1/D a/L 1/D");
    CHECK(split_segments("").empty());
}

TEST_CASE("split_segments concatenates back and alternates classes") {
    Prng rng(3);
    for (int i = 0; i < 2000; ++i) {
        std::string pw;
        const auto len = 1 + rng.below(16);
        for (std::uint64_t j = 0; j < len; ++j) pw += static_cast<char>(0x21 + rng.below(94));
        const auto segs = split_segments(pw);
        std::string joined;
        for (std::size_t k = 0; k < segs.size(); ++k) {
            joined += segs[k].text;
            if (k > 0) CHECK(segs[k].cls != segs[k - 1].cls);
        }
        CHECK(joined == pw);
    }
}

TEST_CASE("build_vocab mines segments then appends single characters") {
    const auto vocab = build_vocab(recs({"love123", "love!"}), 1);
    REQUIRE(vocab.size() >= 9);
    CHECK(vocab.tokens()[0].text == "love");
    CHECK(vocab.tokens()[0].frequency == 2);
    for (const char* c : {"l", "o", "v", "e", "1", "2", "3", "!"}) CHECK(vocab.rank_of(c).has_value());
    // Every charset character is present so any admissible password tokenizes.
    for (char c = 0x21; c < 0x7f; ++c) CHECK(vocab.rank_of(std::string(1, c)).has_value());
}

TEST_CASE("build_vocab on empty corpus and saturation") {
    const auto empty = build_vocab({}, 5);
    for (const auto& t : empty.tokens()) CHECK(t.text.size() == 1);
    CHECK(empty.size() == 94);

    const auto big = build_vocab(recs({"ab12", "cd"}), 1000);
    CHECK(big.rank_of("ab"));
    CHECK(big.rank_of("12"));
    CHECK(big.rank_of("cd"));
}

TEST_CASE("build_vocab is independent of thread count") {
    std::vector<PasswordRecord> records;
    Prng rng(5);
    for (int i = 0; i < 3000; ++i) {
        std::string pw;
        const auto len = 1 + rng.below(10);
        for (std::uint64_t j = 0; j < len; ++j) pw += "ab1!"[rng.below(4)];
        records.push_back({pw, 1});
    }
    const auto one = build_vocab(records, 50, CharsetPolicy(), 1);
    const auto four = build_vocab(records, 50, CharsetPolicy(), 4);
    std::ostringstream a, b;
    one.save(a);
    four.save(b);
    CHECK(a.str() == b.str());
}

TEST_CASE("tokenize examples") {
    const auto vocab = build_vocab(recs({"pass_word!!123"}), 10);
    CHECK(texts(tokenize("pass_word!!123", vocab), vocab) == std::vector<std::string>{"pass", "_", "word", "!!", "123"});

    const auto singles = build_vocab({}, 1);
    CHECK(tokenize("zq", singles).size() == 2);

    const auto love = build_vocab(recs({"love"}), 1);
    CHECK(texts(tokenize("lovelove", love), love) == std::vector<std::string>{"love", "love"});
}

TEST_CASE("vocab save and load round trip") {
    const auto vocab = build_vocab(recs({"love123", "love!", "abc"}), 3);
    std::stringstream io;
    vocab.save(io);
    const auto back = SegmentVocab::load(io);
    REQUIRE(back.size() == vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        CHECK(back.tokens()[i].text == vocab.tokens()[i].text);
        CHECK(back.tokens()[i].frequency == vocab.tokens()[i].frequency);
    }
}

TEST_CASE("pattern_template") {
    CHECK(pattern_template("password!23").render() == "L8S1D2");
    CHECK(pattern_template("1234").render() == "D4");
    CHECK(pattern_template("Ab!9").render() == "L2S1D1");
    CHECK(PatternTemplate::parse("L8S1D2") == pattern_template("password!23"));
    CHECK(PatternTemplate::parse("L12").length() == 12);
}

TEST_CASE("class_signature") {
    CHECK(class_signature("Password!23").render() == "lusd");
    CHECK(class_signature("abc").render() == "l");
    CHECK(class_signature("9A").render() == "ud");
}
