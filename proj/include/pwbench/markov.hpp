#pragma once

#include "pwbench/corpus.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pwbench {

/// Context padding before the first character.
inline constexpr char kBos = '\x02';
/// End-of-password symbol.
inline constexpr char kEos = '\x03';

struct ScoredCandidate {
    std::string text;
    double probability = 0.0;
};

/// Smoothed next-symbol distribution of one context.
struct ContextTable {
    struct Transition {
        char symbol;
        double probability;
    };
    /// Sorted by probability descending, then symbol ascending (EOS sorts first).
    std::vector<Transition> transitions;
    /// Running sums of `transitions` probabilities, for sampling.
    std::vector<double> cumulative;

    double probability_of(char symbol) const;
};

/**
 * Order-k character n-gram model.
 *
 * A context is the k-1 characters before the next symbol, left-padded with
 * kBos. With additive smoothing alpha, P(s | ctx) = (n(ctx, s) + alpha) /
 * (n(ctx) + alpha * V), where s ranges over the training alphabet plus kEos
 * and V is the size of that set. With alpha = 0 unseen transitions have
 * probability zero.
 */
class NgramModel {
public:
    NgramModel(unsigned order, double alpha, std::size_t max_len);

    /// Adds one training sequence with multiplicity `count`. Invalidates tables until finalize().
    void add(std::string_view password, std::uint64_t count = 1);
    /// Builds the per-context probability tables from the counts.
    void finalize();

    unsigned order() const { return order_; }
    double alpha() const { return alpha_; }
    std::size_t max_len() const { return max_len_; }
    bool empty() const { return counts_.empty(); }
    /// Characters seen in training, ascending.
    const std::string& alphabet() const { return alphabet_; }

    /// Context that predicts the symbol following `prefix`.
    std::string context_after(std::string_view prefix) const;
    /// Table for a context; an empty table when the context has no mass.
    const ContextTable& table(std::string_view context) const;
    const std::map<std::string, std::map<char, std::uint64_t>>& counts() const { return counts_; }

    /// Header `ngram<TAB>k<TAB>alpha<TAB>max_len`, then sorted `context<TAB>next<TAB>count`
    /// lines with BOS/EOS written as `\x02`/`\x03` and backslash as `\\`.
    void save(std::ostream& out) const;
    static NgramModel load(std::istream& in);

private:
    unsigned order_;
    double alpha_;
    std::size_t max_len_;
    std::map<std::string, std::map<char, std::uint64_t>> counts_;
    std::unordered_map<std::string, ContextTable> tables_;
    ContextTable unseen_;
    std::string alphabet_;
};

NgramModel train_ngram(const std::vector<PasswordRecord>& records, unsigned order, double alpha = 0.0, std::size_t max_len = 12);

/// Product of conditional probabilities including EOS; 0 beyond max_len.
double ngram_prob(const NgramModel& model, std::string_view password);

/**
 * Most-probable-first enumeration over prefix states.
 *
 * Each frontier node is one child of an expanded prefix; popping a node pushes
 * its next sibling and, for a prefix, its best child, so the frontier grows by
 * at most two nodes per pop. Candidates come out in non-increasing probability,
 * ties in ascending text order. With a limit, nodes below the limit-th best
 * complete password discovered so far are dropped.
 */
class NgramEnumerator {
public:
    /// limit 0 means unbounded; max_frontier 0 means no frontier cap.
    NgramEnumerator(const NgramModel& model, std::uint64_t limit = 0, std::size_t max_frontier = 0);

    std::optional<ScoredCandidate> next();

private:
    struct Node {
        double probability;
        double base_probability;
        std::string text;
        const ContextTable* table;
        std::uint32_t child;
        bool terminal;
    };
    struct Later {
        bool operator()(const Node& a, const Node& b) const;
    };

    void push_child(const std::string& base, double base_probability, const ContextTable& table, std::uint32_t from);
    double threshold() const;

    const NgramModel& model_;
    std::uint64_t limit_;
    std::size_t max_frontier_;
    std::uint64_t emitted_ = 0;
    std::priority_queue<Node, std::vector<Node>, Later> frontier_;
    std::priority_queue<double, std::vector<double>, std::greater<>> best_terminals_;
};

/// Sequences are produced in blocks of this many samples, each block with its own derived seed.
inline constexpr std::size_t kSampleBlock = 4096;

/// Ancestral sampling from BOS; samples longer than max_len (or empty) are redrawn.
class NgramSampler {
public:
    NgramSampler(const NgramModel& model, std::uint64_t seed);

    std::string next();
    /// Samples of block `index` of the stream; thread-safe.
    std::vector<std::string> block(std::uint64_t index) const;

private:
    const NgramModel& model_;
    std::uint64_t seed_;
    std::uint64_t block_index_ = 0;
    std::vector<std::string> buffer_;
    std::size_t position_ = 0;
};

}  // namespace pwbench
