#pragma once

#include "pwbench/corpus.hpp"
#include "pwbench/markov.hpp"
#include "pwbench/segmentation.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace pwbench {

struct TerminalKey {
    CharClass cls;
    std::size_t length;

    friend auto operator<=>(const TerminalKey&, const TerminalKey&) = default;
};

struct Terminal {
    std::string text;
    std::uint64_t count = 0;
    double probability = 0.0;
};

/// Terminals of one (class, length) bucket, most probable first (ties by text).
struct TerminalList {
    std::vector<Terminal> items;
    std::uint64_t total = 0;
    /// Running count sums over `items`, for sampling.
    std::vector<std::uint64_t> cumulative;
    std::unordered_map<std::string, std::uint32_t> index;
};

struct TemplateEntry {
    PatternTemplate pattern;
    std::uint64_t count = 0;
    double probability = 0.0;
    /// Bucket for each run of `pattern`.
    std::vector<const TerminalList*> slots;
};

/// Structure model: a template distribution and per-(class, length) terminal distributions.
class StructureModel {
public:
    void add(std::string_view password, std::uint64_t count = 1);
    void finalize();

    /// Most probable first; ties by rendered pattern.
    const std::vector<TemplateEntry>& templates() const { return templates_; }
    const TerminalList* terminals(TerminalKey key) const;
    const std::map<TerminalKey, TerminalList>& terminal_table() const { return terminals_; }
    std::uint64_t template_total() const { return template_total_; }

    /// `pattern<TAB>count` lines.
    void save_templates(std::ostream& out) const;
    /// `class<TAB>length<TAB>text<TAB>count` lines.
    void save_terminals(std::ostream& out) const;
    static StructureModel load(std::istream& templates, std::istream& terminals);

    /// Writes/reads `templates.tsv` and `terminals.tsv` in a directory.
    void save_dir(const std::string& dir) const;
    static StructureModel load_dir(const std::string& dir);

private:
    std::map<std::string, std::uint64_t> template_counts_;
    std::map<TerminalKey, std::map<std::string, std::uint64_t>> terminal_counts_;
    std::vector<TemplateEntry> templates_;
    std::unordered_map<std::string, std::size_t> template_index_;
    std::map<TerminalKey, TerminalList> terminals_;
    std::uint64_t template_total_ = 0;

    friend double structure_prob(const StructureModel& model, std::string_view password);
};

/// Throws DataError on an empty stream.
StructureModel train_structure(const std::vector<PasswordRecord>& records);

/// P(template) times the product of slot terminal probabilities; 0 when unreachable.
double structure_prob(const StructureModel& model, std::string_view password);

/**
 * Best-first enumeration of the template x terminal cross product.
 *
 * A frontier entry is a template with one terminal rank per slot. Popping an
 * entry pushes each single-slot rank successor not seen before.
 */
class StructureEnumerator {
public:
    /// limit 0 means unbounded; max_frontier 0 means no cap.
    StructureEnumerator(const StructureModel& model, std::uint64_t limit = 0, std::size_t max_frontier = 0);

    std::optional<ScoredCandidate> next();

private:
    struct Entry {
        double probability;
        std::string text;
        std::uint32_t template_index;
        std::vector<std::uint32_t> ranks;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.probability != b.probability) return a.probability < b.probability;
            return a.text > b.text;
        }
    };

    void push(std::uint32_t template_index, std::vector<std::uint32_t> ranks);

    const StructureModel& model_;
    std::uint64_t limit_;
    std::size_t max_frontier_;
    std::uint64_t emitted_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> frontier_;
    std::unordered_set<std::string> seen_;
};

/// Samples a template, then each slot independently, from the integer counts.
class StructureSampler {
public:
    StructureSampler(const StructureModel& model, std::uint64_t seed);

    std::string next();
    std::vector<std::string> block(std::uint64_t index) const;

private:
    const StructureModel& model_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> template_cumulative_;
    std::uint64_t block_index_ = 0;
    std::vector<std::string> buffer_;
    std::size_t position_ = 0;
};

}  // namespace pwbench
