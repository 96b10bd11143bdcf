#include "pwbench/string_set.hpp"

#include "pwbench/error.hpp"

#include <cstring>
#include <string>

namespace pwbench {

std::string_view StringSet::store(std::string_view text) {
    if (text.size() > kChunk / 4) {
        large_.push_back(std::make_unique<char[]>(text.size()));
        std::memcpy(large_.back().get(), text.data(), text.size());
        arena_bytes_ += text.size();
        return {large_.back().get(), text.size()};
    }
    if (chunk_used_ + text.size() > kChunk) {
        chunks_.push_back(std::make_unique<char[]>(kChunk));
        chunk_used_ = 0;
        arena_bytes_ += kChunk;
    }
    char* dest = chunks_.back().get() + chunk_used_;
    std::memcpy(dest, text.data(), text.size());
    chunk_used_ += text.size();
    return {dest, text.size()};
}

std::pair<std::string_view, bool> StringSet::emplace(std::string_view text) {
    if (const auto it = set_.find(text); it != set_.end()) return {*it, false};
    if (max_entries_ > 0 && set_.size() >= max_entries_) {
        throw ResourceLimitError("unique-string cap of " + std::to_string(max_entries_) + " entries exceeded");
    }
    const auto stored = store(text);
    set_.insert(stored);
    return {stored, true};
}

std::size_t StringSet::memory_bytes() const {
    // Node (view + hash + next pointer) plus bucket slot per entry.
    return arena_bytes_ + set_.size() * (sizeof(std::string_view) + 2 * sizeof(void*)) + set_.bucket_count() * sizeof(void*);
}

}  // namespace pwbench
