#include "pwbench/prince.hpp"

#include "pwbench/error.hpp"

#include <algorithm>
#include <unordered_set>

namespace pwbench {

LengthIndex build_length_index(const std::vector<PasswordRecord>& words) {
    LengthIndex index;
    std::unordered_set<std::string_view> seen;
    for (const auto& word : words) {
        if (word.text.empty() || !seen.insert(word.text).second) continue;
        index[word.text.size()].push_back(word.text);
    }
    return index;
}

namespace {

void compose(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems,
             std::vector<std::size_t>& current, std::size_t total, std::vector<ChainSpec>& out) {
    if (!current.empty() && total >= min_len) {
        ChainSpec spec{current, 1};
        for (auto len : current) spec.keyspace *= index.at(len).size();
        out.push_back(std::move(spec));
    }
    if (current.size() == max_elems) return;
    for (const auto& [len, bucket] : index) {
        if (total + len > max_len) break;
        if (bucket.empty()) continue;
        current.push_back(len);
        compose(index, min_len, max_len, max_elems, current, total + len, out);
        current.pop_back();
    }
}

}  // namespace

std::vector<ChainSpec> chain_specs(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems) {
    if (min_len > max_len) throw DataError("chain window: min_len must be <= max_len");
    if (max_elems < 1) throw DataError("chain window: max_elems must be >= 1");
    std::vector<ChainSpec> specs;
    std::vector<std::size_t> current;
    compose(index, min_len, max_len, max_elems, current, 0, specs);
    std::stable_sort(specs.begin(), specs.end(), [](const ChainSpec& a, const ChainSpec& b) {
        if (a.keyspace != b.keyspace) return a.keyspace < b.keyspace;
        return a.element_lengths < b.element_lengths;
    });
    return specs;
}

Keyspace chain_keyspace(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems) {
    Keyspace total = 0;
    for (const auto& spec : chain_specs(index, min_len, max_len, max_elems)) total += spec.keyspace;
    return total;
}

ChainEnumerator::ChainEnumerator(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems)
    : index_(index), specs_(chain_specs(index, min_len, max_len, max_elems)) {}

bool ChainEnumerator::advance() {
    if (!started_) {
        started_ = true;
    } else {
        // Increment the mixed-radix counter, last digit fastest.
        for (std::size_t i = digits_.size(); i-- > 0;) {
            if (++digits_[i] < buckets_[i]->size()) return true;
            digits_[i] = 0;
        }
        ++spec_;
    }
    if (spec_ >= specs_.size()) return false;
    buckets_.clear();
    for (auto len : specs_[spec_].element_lengths) buckets_.push_back(&index_.at(len));
    digits_.assign(buckets_.size(), 0);
    return true;
}

bool ChainEnumerator::next(std::string& out) {
    if (!advance()) return false;
    out.clear();
    for (std::size_t i = 0; i < digits_.size(); ++i) out += (*buckets_[i])[digits_[i]];
    return true;
}

}  // namespace pwbench
