#include "pwbench/segmentation.hpp"

#include "pwbench/error.hpp"
#include "pwbench/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <future>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace pwbench {

CharClass char_class(char ch) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x20 || c > 0x7e) throw std::invalid_argument("character outside the printable ASCII charset: byte " + std::to_string(c));
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return CharClass::Letter;
    if (c >= '0' && c <= '9') return CharClass::Digit;
    return CharClass::Special;
}

char class_symbol(CharClass cls) {
    switch (cls) {
        case CharClass::Letter: return 'L';
        case CharClass::Digit: return 'D';
        case CharClass::Special: return 'S';
    }
    return '?';
}

CharClass class_from_symbol(char symbol) {
    switch (symbol) {
        case 'L': return CharClass::Letter;
        case 'D': return CharClass::Digit;
        case 'S': return CharClass::Special;
        default: throw DataError(std::string("unknown character class '") + symbol + "'");
    }
}

std::vector<Segment> split_segments(std::string_view password) {
    std::vector<Segment> out;
    std::size_t start = 0;
    while (start < password.size()) {
        const CharClass cls = char_class(password[start]);
        std::size_t end = start + 1;
        while (end < password.size() && char_class(password[end]) == cls) ++end;
        out.push_back({std::string(password.substr(start, end - start)), cls});
        start = end;
    }
    return out;
}

SegmentVocab::SegmentVocab(std::vector<VocabToken> tokens) : tokens_(std::move(tokens)) {
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (tokens_[i].text.empty()) throw DataError("vocab token " + std::to_string(i) + " is empty");
        if (!index_.emplace(tokens_[i].text, static_cast<std::uint32_t>(i)).second) {
            throw DataError("duplicate vocab token '" + tokens_[i].text + "'");
        }
        max_len_ = std::max(max_len_, tokens_[i].text.size());
    }
}

std::optional<std::uint32_t> SegmentVocab::rank_of(std::string_view text) const {
    const auto it = index_.find(std::string(text));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void SegmentVocab::save(std::ostream& out) const {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        out << i << '\t' << tokens_[i].frequency << '\t' << tokens_[i].text << '\n';
    }
}

SegmentVocab SegmentVocab::load(std::istream& in) {
    std::vector<VocabToken> tokens;
    std::string line;
    while (read_line(in, line)) {
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw DataError("vocab line " + std::to_string(tokens.size() + 1) + ": expected rank<TAB>frequency<TAB>text");
        const std::uint64_t rank = parse_count(std::string_view(line).substr(0, t1));
        if (rank != tokens.size()) throw DataError("vocab line " + std::to_string(tokens.size() + 1) + ": ranks must be consecutive from 0");
        VocabToken token;
        token.frequency = parse_count(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
        token.text = line.substr(t2 + 1);
        tokens.push_back(std::move(token));
    }
    return SegmentVocab(std::move(tokens));
}

namespace {

struct ShardCounts {
    std::unordered_map<std::string, std::uint64_t> segments;
    std::array<std::uint64_t, 256> chars{};

    void merge(ShardCounts&& other) {
        for (auto& [text, count] : other.segments) segments[text] += count;
        for (std::size_t c = 0; c < chars.size(); ++c) chars[c] += other.chars[c];
    }
};

ShardCounts count_shard(const std::vector<PasswordRecord>& records, std::size_t begin, std::size_t end) {
    ShardCounts counts;
    for (std::size_t i = begin; i < end; ++i) {
        const auto& record = records[i];
        for (auto& segment : split_segments(record.text)) counts.segments[segment.text] += record.count;
        for (char ch : record.text) counts.chars[static_cast<unsigned char>(ch)] += record.count;
    }
    return counts;
}

}  // namespace

SegmentVocab build_vocab(const std::vector<PasswordRecord>& records, std::size_t n, const CharsetPolicy& charset, unsigned threads) {
    if (n < 1) throw DataError("vocab size must be >= 1");
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(records.size() / 4096 + 1)));

    ShardCounts total;
    if (threads == 1) {
        total = count_shard(records, 0, records.size());
    } else {
        std::vector<std::future<ShardCounts>> shards;
        const std::size_t chunk = (records.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = std::min(records.size(), t * chunk);
            const std::size_t end = std::min(records.size(), begin + chunk);
            shards.push_back(std::async(std::launch::async, count_shard, std::cref(records), begin, end));
        }
        for (auto& shard : shards) total.merge(shard.get());
    }

    std::vector<VocabToken> mined;
    mined.reserve(total.segments.size());
    for (auto& [text, count] : total.segments) mined.push_back({text, count});
    const auto by_rank = [](const VocabToken& a, const VocabToken& b) {
        if (a.frequency != b.frequency) return a.frequency > b.frequency;
        return a.text < b.text;
    };
    if (mined.size() > n) {
        std::partial_sort(mined.begin(), mined.begin() + static_cast<std::ptrdiff_t>(n), mined.end(), by_rank);
        mined.resize(n);
    } else {
        std::sort(mined.begin(), mined.end(), by_rank);
    }

    std::array<bool, 256> present{};
    for (const auto& token : mined) {
        if (token.text.size() == 1) present[static_cast<unsigned char>(token.text[0])] = true;
    }
    std::vector<VocabToken> singles;
    for (char ch : charset.characters()) {
        const auto c = static_cast<unsigned char>(ch);
        if (!present[c]) singles.push_back({std::string(1, ch), total.chars[c]});
    }
    // Corpus characters outside the charset still need a token for tokenize() to be total.
    for (unsigned c = 0; c < 256; ++c) {
        if (total.chars[c] > 0 && !present[c] && !charset.allows(static_cast<char>(c))) {
            singles.push_back({std::string(1, static_cast<char>(c)), total.chars[c]});
        }
    }
    std::stable_sort(singles.begin(), singles.end(), by_rank);
    mined.insert(mined.end(), std::make_move_iterator(singles.begin()), std::make_move_iterator(singles.end()));
    return SegmentVocab(std::move(mined));
}

std::vector<std::uint32_t> tokenize(std::string_view password, const SegmentVocab& vocab) {
    std::vector<std::uint32_t> ranks;
    for (const auto& segment : split_segments(password)) {
        if (const auto whole = vocab.rank_of(segment.text)) {
            ranks.push_back(*whole);
            continue;
        }
        std::string_view rest = segment.text;
        while (!rest.empty()) {
            bool found = false;
            for (std::size_t len = std::min(rest.size(), vocab.max_token_length()); len > 0; --len) {
                if (const auto rank = vocab.rank_of(rest.substr(0, len))) {
                    ranks.push_back(*rank);
                    rest.remove_prefix(len);
                    found = true;
                    break;
                }
            }
            if (!found) throw std::invalid_argument(std::string("no vocab token covers character '") + rest[0] + "'");
        }
    }
    return ranks;
}

std::string detokenize(const std::vector<std::uint32_t>& ranks, const SegmentVocab& vocab) {
    std::string out;
    for (auto rank : ranks) out += vocab.tokens().at(rank).text;
    return out;
}

std::string PatternTemplate::render() const {
    std::string out;
    for (const auto& run : runs) {
        out += class_symbol(run.cls);
        out += std::to_string(run.length);
    }
    return out;
}

PatternTemplate PatternTemplate::parse(std::string_view text) {
    PatternTemplate pattern;
    std::size_t i = 0;
    while (i < text.size()) {
        const CharClass cls = class_from_symbol(text[i++]);
        std::size_t length = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), length);
        if (ec != std::errc{} || length == 0) throw DataError("malformed pattern '" + std::string(text) + "'");
        i = static_cast<std::size_t>(ptr - text.data());
        if (!pattern.runs.empty() && pattern.runs.back().cls == cls) {
            throw DataError("pattern '" + std::string(text) + "' repeats a class in adjacent runs");
        }
        pattern.runs.push_back({cls, length});
    }
    if (pattern.runs.empty()) throw DataError("empty pattern");
    return pattern;
}

std::size_t PatternTemplate::length() const {
    std::size_t total = 0;
    for (const auto& run : runs) total += run.length;
    return total;
}

PatternTemplate pattern_template(std::string_view password) {
    PatternTemplate pattern;
    for (char ch : password) {
        const CharClass cls = char_class(ch);
        if (!pattern.runs.empty() && pattern.runs.back().cls == cls) {
            ++pattern.runs.back().length;
        } else {
            pattern.runs.push_back({cls, 1});
        }
    }
    return pattern;
}

std::string ClassSignature::render() const {
    std::string out;
    if (lower) out += 'l';
    if (upper) out += 'u';
    if (special) out += 's';
    if (digit) out += 'd';
    return out;
}

ClassSignature class_signature(std::string_view password) {
    ClassSignature sig;
    for (char ch : password) {
        switch (char_class(ch)) {
            case CharClass::Letter:
                (ch >= 'a' && ch <= 'z' ? sig.lower : sig.upper) = true;
                break;
            case CharClass::Digit: sig.digit = true; break;
            case CharClass::Special: sig.special = true; break;
        }
    }
    return sig;
}

}  // namespace pwbench
