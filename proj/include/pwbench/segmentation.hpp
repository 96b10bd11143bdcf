#pragma once

#include "pwbench/corpus.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pwbench {

enum class CharClass : std::uint8_t { Letter, Digit, Special };

/// Letters (either case) map to Letter, digits to Digit, every other printable
/// ASCII character to Special. Throws std::invalid_argument outside 0x20..0x7E.
CharClass char_class(char ch);

/// 'L', 'D' or 'S'.
char class_symbol(CharClass cls);
CharClass class_from_symbol(char symbol);

struct Segment {
    std::string text;
    CharClass cls;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Maximal single-class runs, in order.
std::vector<Segment> split_segments(std::string_view password);

struct VocabToken {
    std::string text;
    std::uint64_t frequency = 0;
};

/// Ranked segment vocabulary; the rank of a token is its index.
class SegmentVocab {
public:
    SegmentVocab() = default;
    explicit SegmentVocab(std::vector<VocabToken> tokens);

    const std::vector<VocabToken>& tokens() const { return tokens_; }
    std::size_t size() const { return tokens_.size(); }
    std::optional<std::uint32_t> rank_of(std::string_view text) const;
    std::size_t max_token_length() const { return max_len_; }

    /// `rank<TAB>frequency<TAB>text` per line, ranks ascending.
    void save(std::ostream& out) const;
    static SegmentVocab load(std::istream& in);

private:
    std::vector<VocabToken> tokens_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t max_len_ = 0;
};

/// Top-n segments by weighted frequency (ties lexicographic ascending), followed
/// by every charset character not mined yet, ordered by weighted character
/// frequency descending then byte. `threads` > 1 counts shards in parallel.
SegmentVocab build_vocab(const std::vector<PasswordRecord>& records, std::size_t n,
                         const CharsetPolicy& charset = CharsetPolicy(), unsigned threads = 1);

/// Token ranks for `password`: whole segments when in the vocab, otherwise the
/// longest vocab prefixes left to right. Throws std::invalid_argument when a
/// character has no token.
std::vector<std::uint32_t> tokenize(std::string_view password, const SegmentVocab& vocab);

std::string detokenize(const std::vector<std::uint32_t>& ranks, const SegmentVocab& vocab);

struct PatternRun {
    CharClass cls;
    std::size_t length;

    friend bool operator==(const PatternRun&, const PatternRun&) = default;
};

/// Class-and-length run sequence, e.g. L8S1D2. Case is folded into L.
struct PatternTemplate {
    std::vector<PatternRun> runs;

    std::string render() const;
    /// Inverse of render(); throws DataError on malformed text.
    static PatternTemplate parse(std::string_view text);
    std::size_t length() const;

    friend bool operator==(const PatternTemplate&, const PatternTemplate&) = default;
    friend auto operator<=>(const PatternTemplate& a, const PatternTemplate& b) { return a.render() <=> b.render(); }
};

PatternTemplate pattern_template(std::string_view password);

/// Presence of lower, upper, special and digit characters, rendered in that order ("lusd").
struct ClassSignature {
    bool lower = false;
    bool upper = false;
    bool special = false;
    bool digit = false;

    std::string render() const;
    friend bool operator==(const ClassSignature&, const ClassSignature&) = default;
};

ClassSignature class_signature(std::string_view password);

}  // namespace pwbench
