#pragma once

#include <bitset>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pwbench {

/**
 * Which passwords are admitted at ingestion.
 *
 * Characters are restricted to printable ASCII (0x20..0x7E), so every
 * downstream module can treat one byte as one character. The default policy
 * admits the 94 printable characters except space, lengths 1..12.
 */
class CharsetPolicy {
public:
    CharsetPolicy();
    CharsetPolicy(std::string_view allowed, std::size_t min_len, std::size_t max_len);

    /// Policy file: `key=value` lines (`allowed=`, `min_len=`, `max_len=`); `#` comments.
    /// The value of `allowed=` is taken verbatim to the end of the line.
    static CharsetPolicy load(const std::string& path);

    bool allows(char ch) const { return allowed_[static_cast<unsigned char>(ch)]; }
    bool admits(std::string_view text) const;

    std::size_t min_len() const { return min_len_; }
    std::size_t max_len() const { return max_len_; }
    void set_length_window(std::size_t min_len, std::size_t max_len);

    /// Allowed characters in ascending byte order.
    std::string characters() const;

private:
    std::bitset<256> allowed_;
    std::size_t min_len_ = 1;
    std::size_t max_len_ = 12;
};

struct PasswordRecord {
    std::string text;
    std::uint64_t count = 1;

    friend bool operator==(const PasswordRecord&, const PasswordRecord&) = default;
};

struct CorpusStats {
    std::uint64_t total_lines = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected_charset = 0;
    std::uint64_t rejected_length = 0;
    std::uint64_t rejected_encoding = 0;

    std::uint64_t rejected() const { return rejected_charset + rejected_length + rejected_encoding; }
};

struct CorpusSplit {
    std::vector<PasswordRecord> train;
    std::vector<PasswordRecord> test;
    std::uint64_t seed = 0;
    double ratio = 0.8;
};

/// Streaming reader for plain (`text`) or weighted (`text<TAB>count`) wordlists.
class WordlistReader {
public:
    WordlistReader(std::istream& in, CharsetPolicy policy, bool weighted);

    /// Next accepted record; rejected lines are counted and skipped.
    bool next(PasswordRecord& record);
    const CorpusStats& stats() const { return stats_; }

private:
    std::istream& in_;
    CharsetPolicy policy_;
    bool weighted_;
    CorpusStats stats_;
    std::string line_;
};

struct LoadedWordlist {
    std::vector<PasswordRecord> records;
    CorpusStats stats;
};

/// Reads a whole wordlist ("-" for stdin). Unreadable files throw DataError.
LoadedWordlist load_wordlist(const std::string& path, const CharsetPolicy& policy, bool weighted);

/// Keeps the first occurrence of each text, summing counts.
std::vector<PasswordRecord> dedup_stream(const std::vector<PasswordRecord>& records);

/// Seeded Fisher-Yates shuffle, then the first floor(ratio * n) records go to train.
CorpusSplit split_corpus(std::vector<PasswordRecord> records, double ratio, std::uint64_t seed);

/// Unique test texts that pass `policy` and are absent from `exclude_train`, first-occurrence order.
std::vector<PasswordRecord> prepare_cross_eval(const std::vector<PasswordRecord>& test,
                                               const std::vector<PasswordRecord>& exclude_train,
                                               const CharsetPolicy& policy);

/// Writes records one per line; weighted form appends `<TAB>count`.
void write_wordlist(std::ostream& out, const std::vector<PasswordRecord>& records, bool weighted);

std::uint64_t total_count(const std::vector<PasswordRecord>& records);

/// True when `text` is well-formed UTF-8.
bool valid_utf8(std::string_view text);

}  // namespace pwbench
