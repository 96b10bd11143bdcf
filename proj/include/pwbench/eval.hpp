#pragma once

#include "pwbench/corpus.hpp"
#include "pwbench/io.hpp"
#include "pwbench/rules.hpp"
#include "pwbench/segmentation.hpp"
#include "pwbench/string_set.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwbench {

/// Exact membership over the unique texts of a test set.
class Matcher {
public:
    Matcher() = default;
    explicit Matcher(StringSet set) : set_(std::move(set)) {}

    bool contains(std::string_view text) const { return set_.contains(text); }
    std::size_t size() const { return set_.size(); }
    std::size_t memory_bytes() const { return set_.memory_bytes(); }

private:
    StringSet set_;
};

Matcher build_matcher(const std::vector<PasswordRecord>& test);
Matcher build_matcher(const CandidateSource& test);

struct LedgerRow {
    std::uint64_t generated = 0;
    std::uint64_t unique = 0;
    std::uint64_t matched = 0;
    /// True for the end-of-stream row appended when the stream ran out before the last checkpoint.
    bool final = false;
};

/// Per-checkpoint accounting for one candidate stream against one test set.
struct MatchLedger {
    std::vector<LedgerRow> rows;
    std::uint64_t test_size = 0;

    /// matched / test_size at 6 decimals.
    std::string fraction(const LedgerRow& row) const;
    /// `generated<TAB>unique<TAB>matched<TAB>matched_fraction` with a header line.
    void write_tsv(std::ostream& out) const;
    void write_json(std::ostream& out) const;
};

struct MatchOptions {
    /// Strictly increasing; the stream is consumed up to the last one (fully when empty).
    std::vector<std::uint64_t> checkpoints;
    /// Cap on distinct candidates held for dedup; 0 = unlimited.
    std::size_t max_unique = 0;
};

/// Streams candidates, deduplicating and matching; `matched_out` (optional)
/// receives each matched test text once, in order of first hit.
MatchLedger match_stream(const CandidateSource& candidates, const Matcher& matcher, const MatchOptions& options,
                         std::vector<std::string>* matched_out = nullptr);

/**
 * Two-pass matching for test sets that do not fit in memory.
 *
 * Pass one hashes candidates (with their stream index) and test lines into
 * `partitions` temporary files under `tmp_dir`; pass two matches one partition
 * at a time. Identical text always lands in the same partition, so dedup and
 * matching stay exact and the ledger equals match_stream's.
 */
MatchLedger match_stream_partitioned(const CandidateSource& candidates, const std::string& test_path,
                                     const MatchOptions& options, std::size_t partitions, const std::string& tmp_dir,
                                     std::vector<std::string>* matched_out = nullptr);

struct RuleAugmentedReport {
    std::string ruleset;
    std::uint64_t generated = 0;         // N0
    std::uint64_t unique = 0;            // N*0
    std::uint64_t matched = 0;           // M0
    std::uint64_t rules_attempted = 0;   // chains x N*0
    std::uint64_t rules_produced = 0;    // after rejection, before dedup
    std::uint64_t rules_unique = 0;      // N_rules
    std::uint64_t rules_matched = 0;     // M_rules, union with raw matches
    std::uint64_t test_size = 0;

    void write_tsv(std::ostream& out) const;
};

RuleAugmentedReport rule_augmented_match(const CandidateSource& candidates, const RuleSet& ruleset, const Matcher& matcher,
                                         unsigned threads = 1, std::size_t max_unique = 0);

struct LabeledSet {
    std::string label;
    std::vector<std::string> items;
};

/// Venn decomposition of 2..6 sets. Bit i of a region index is set when the region lies inside set i.
struct IntersectionReport {
    std::vector<std::string> labels;
    /// Indexed by region bitmask; entry 0 is unused.
    std::vector<std::uint64_t> regions;
    std::uint64_t union_size = 0;

    /// `region-bitmask<TAB>count`, mask written as one 0/1 character per set in label order.
    void write_tsv(std::ostream& out) const;
    void write_summary(std::ostream& out) const;
    std::string mask_text(std::size_t mask) const;
};

IntersectionReport intersections(const std::vector<LabeledSet>& sets);

struct TopFrequency {
    std::string text;
    std::uint64_t count = 0;
    std::uint64_t total = 0;

    double relative() const { return static_cast<double>(count) / static_cast<double>(total); }
};

/// Modal candidate (ties: lexicographically smallest); throws DataError on an empty stream.
TopFrequency top_frequency(const CandidateSource& candidates);

struct Histogram {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(const std::string& key, std::uint64_t weight = 1);
    std::string fraction(const std::string& key, int digits = 6) const;
};

struct StatComparison {
    std::string name;
    Histogram candidates;
    Histogram reference;
    /// Exact sum of |p - q|, as numerator / denominator.
    unsigned __int128 l1_numerator = 0;
    unsigned __int128 l1_denominator = 1;

    double l1() const { return static_cast<double>(l1_numerator) / static_cast<double>(l1_denominator); }
    std::string l1_text(int digits = 6) const;
    /// `key<TAB>candidate_count<TAB>candidate_fraction<TAB>reference_count<TAB>reference_fraction`.
    void write_tsv(std::ostream& out) const;
};

struct StatReport {
    StatComparison pattern;
    StatComparison signature;
    StatComparison segments;
    /// Candidate lines skipped for containing non-printable-ASCII bytes.
    std::uint64_t skipped = 0;

    void write_summary(std::ostream& out) const;
};

/// Pattern-template, class-signature and token-count histograms of a
/// candidate stream against a weighted reference, with L1 distances.
StatReport stats_report(const CandidateSource& candidates, const std::vector<PasswordRecord>& reference, const SegmentVocab& vocab);

}  // namespace pwbench
