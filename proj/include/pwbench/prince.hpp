#pragma once

#include "pwbench/corpus.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pwbench {

using Keyspace = boost::multiprecision::cpp_int;

/// Unique words bucketed by length, first-occurrence order within a bucket.
using LengthIndex = std::map<std::size_t, std::vector<std::string>>;

struct ChainSpec {
    std::vector<std::size_t> element_lengths;
    Keyspace keyspace;
};

LengthIndex build_length_index(const std::vector<PasswordRecord>& words);

/// Every element-length sequence with 1..max_elems parts, total length in
/// [min_len, max_len] and non-empty buckets, ordered by keyspace ascending then
/// element lengths lexicographically.
std::vector<ChainSpec> chain_specs(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems);

/// Exact number of candidates enumerate_chains emits (before any dedup).
Keyspace chain_keyspace(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems);

/**
 * Concatenation chains over a length index.
 *
 * Specs are visited in chain_specs order; within a spec the candidates follow
 * mixed-radix order with the last element varying fastest.
 */
class ChainEnumerator {
public:
    ChainEnumerator(const LengthIndex& index, std::size_t min_len, std::size_t max_len, std::size_t max_elems = 8);

    bool next(std::string& out);
    const std::vector<ChainSpec>& specs() const { return specs_; }

private:
    bool advance();

    const LengthIndex& index_;
    std::vector<ChainSpec> specs_;
    std::vector<const std::vector<std::string>*> buckets_;
    std::vector<std::size_t> digits_;
    std::size_t spec_ = 0;
    bool started_ = false;
};

}  // namespace pwbench
