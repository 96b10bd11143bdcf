#pragma once

#include "pwbench/corpus.hpp"
#include "pwbench/io.hpp"
#include "pwbench/string_set.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pwbench {

/// Supported mangling primitives, named by their rule-file opcode.
enum class RuleOp : char {
    Noop = ':',
    Lower = 'l',
    Upper = 'u',
    Capitalize = 'c',
    InvertCapitalize = 'C',
    ToggleAll = 't',
    ToggleAt = 'T',
    Reverse = 'r',
    Duplicate = 'd',
    DuplicateN = 'p',
    Reflect = 'f',
    RotateLeft = '{',
    RotateRight = '}',
    Append = '$',
    Prepend = '^',
    DeleteFirst = '[',
    DeleteLast = ']',
    DeleteAt = 'D',
    TruncateAt = '\'',
    Substitute = 's',
    Purge = '@',
    DuplicateFirstN = 'z',
    DuplicateLastN = 'Z',
};

struct RulePrimitive {
    RuleOp op = RuleOp::Noop;
    /// Character operands ($X, ^X, @X, sXY).
    char from = 0;
    char to = 0;
    /// Positional or count operand, 0..35.
    std::uint8_t n = 0;

    std::string render() const;
    friend bool operator==(const RulePrimitive&, const RulePrimitive&) = default;
};

struct RuleChain {
    std::vector<RulePrimitive> primitives;
    std::string source_text;

    /// Primitives joined by single spaces.
    std::string render() const;
    friend bool operator==(const RuleChain& a, const RuleChain& b) { return a.primitives == b.primitives; }
};

/// Longest working buffer; longer intermediate results reject the word.
inline constexpr std::size_t kMaxRuleBuffer = 64;

/// Parses one rule line. Returns nullopt for blank and `#` comment lines.
/// Throws RuleParseError naming `line_no` and the 1-based column.
std::optional<RuleChain> parse_rule_line(std::string_view text, std::size_t line_no = 1);

/// Applies the chain; nullopt when the word is rejected (out-of-range position,
/// buffer overflow, or an empty result).
std::optional<std::string> apply_chain(const RuleChain& chain, std::string_view word);

struct RuleSet {
    std::string name;
    std::vector<RuleChain> chains;

    /// Parses a rule file; chains that render identically to an earlier one are dropped.
    static RuleSet parse(std::istream& in, std::string name);
    static RuleSet load(const std::string& path);
};

struct RuleExpansionStats {
    std::uint64_t words = 0;
    /// chains x words.
    std::uint64_t attempted = 0;
    std::uint64_t rejected = 0;
    /// Outputs after rejection, before dedup.
    std::uint64_t produced = 0;
    /// Outputs actually emitted (after dedup when enabled).
    std::uint64_t emitted = 0;
};

/**
 * Streams every chain's output for every word, in word-major, ruleset order.
 *
 * Words are expanded in fixed-size batches; with threads > 1 a batch is split
 * across workers and reassembled in order, so the output never depends on the
 * thread count. The optional dedup filter keeps first occurrences.
 */
class RuleExpander {
public:
    RuleExpander(const RuleSet& ruleset, CandidateSource words, bool dedup, unsigned threads = 1,
                 std::size_t max_unique = 0);

    bool next(std::string& out);
    const RuleExpansionStats& stats() const { return stats_; }

private:
    bool refill();

    const RuleSet& ruleset_;
    CandidateSource words_;
    bool dedup_;
    unsigned threads_;
    StringSet seen_;
    RuleExpansionStats stats_;
    std::vector<std::string> batch_;
    std::size_t position_ = 0;
    bool exhausted_ = false;
};

/// Expands a record stream; a record with count c contributes its outputs c times.
std::vector<std::string> apply_ruleset(const RuleSet& ruleset, const std::vector<PasswordRecord>& words, bool dedup,
                                       RuleExpansionStats* stats = nullptr);

}  // namespace pwbench
