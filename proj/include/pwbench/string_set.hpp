#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pwbench {

/**
 * Exact string membership set backed by an append-only arena.
 *
 * Inserting past `max_entries` (when non-zero) throws ResourceLimitError.
 * Readers may query concurrently once no more inserts happen.
 */
class StringSet {
public:
    explicit StringSet(std::size_t max_entries = 0) : max_entries_(max_entries) {}

    StringSet(StringSet&&) = default;
    StringSet& operator=(StringSet&&) = default;

    /// True when `text` was not present before.
    bool insert(std::string_view text) { return emplace(text).second; }
    /// Stored view of `text` and whether it was newly inserted. Views stay valid for the set's lifetime.
    std::pair<std::string_view, bool> emplace(std::string_view text);
    bool contains(std::string_view text) const { return set_.contains(text); }
    std::size_t size() const { return set_.size(); }
    void reserve(std::size_t n) { set_.reserve(n); }

    /// Rough resident size in bytes.
    std::size_t memory_bytes() const;

    template <typename F>
    void for_each(F&& f) const {
        for (auto view : set_) f(view);
    }

private:
    std::string_view store(std::string_view text);

    static constexpr std::size_t kChunk = 1 << 20;
    std::size_t max_entries_;
    std::vector<std::unique_ptr<char[]>> chunks_;
    std::vector<std::unique_ptr<char[]>> large_;
    std::size_t chunk_used_ = kChunk;
    std::size_t arena_bytes_ = 0;
    std::unordered_set<std::string_view> set_;
};

}  // namespace pwbench
