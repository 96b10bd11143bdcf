#include "pwbench/corpus.hpp"

#include "pwbench/error.hpp"
#include "pwbench/io.hpp"
#include "pwbench/random.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace pwbench {

namespace {

constexpr bool printable_ascii(unsigned char c) { return c >= 0x20 && c <= 0x7e; }

}  // namespace

CharsetPolicy::CharsetPolicy() {
    for (unsigned c = 0x21; c <= 0x7e; ++c) allowed_.set(c);
}

CharsetPolicy::CharsetPolicy(std::string_view allowed, std::size_t min_len, std::size_t max_len) {
    for (char ch : allowed) {
        const auto c = static_cast<unsigned char>(ch);
        if (!printable_ascii(c)) {
            throw DataError("charset policy may only contain printable ASCII characters (got byte " +
                            std::to_string(static_cast<unsigned>(c)) + ")");
        }
        allowed_.set(c);
    }
    if (allowed_.none()) throw DataError("charset policy allows no characters");
    set_length_window(min_len, max_len);
}

void CharsetPolicy::set_length_window(std::size_t min_len, std::size_t max_len) {
    if (min_len < 1) throw DataError("charset policy min_len must be >= 1");
    if (max_len < min_len) throw DataError("charset policy max_len must be >= min_len");
    min_len_ = min_len;
    max_len_ = max_len;
}

CharsetPolicy CharsetPolicy::load(const std::string& path) {
    InputFile in(path);
    std::string line;
    std::string allowed;
    bool have_allowed = false;
    std::size_t min_len = 1;
    std::size_t max_len = 12;
    std::size_t line_no = 0;
    while (read_line(in.stream(), line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError(path + ":" + std::to_string(line_no) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "allowed") {
            allowed = value;
            have_allowed = true;
        } else if (key == "min_len") {
            min_len = parse_count(value);
        } else if (key == "max_len") {
            max_len = parse_count(value);
        } else {
            throw DataError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!have_allowed) {
        CharsetPolicy policy;
        policy.set_length_window(min_len, max_len);
        return policy;
    }
    return CharsetPolicy(allowed, min_len, max_len);
}

bool CharsetPolicy::admits(std::string_view text) const {
    if (text.size() < min_len_ || text.size() > max_len_) return false;
    for (char ch : text) {
        if (!allows(ch)) return false;
    }
    return true;
}

std::string CharsetPolicy::characters() const {
    std::string out;
    for (unsigned c = 0; c < 256; ++c) {
        if (allowed_[c]) out += static_cast<char>(c);
    }
    return out;
}

bool valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            extra = 1;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= text.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        // Overlong forms, surrogates, out of range.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) return false;
        if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
        i += extra + 1;
    }
    return true;
}

WordlistReader::WordlistReader(std::istream& in, CharsetPolicy policy, bool weighted)
    : in_(in), policy_(std::move(policy)), weighted_(weighted) {}

bool WordlistReader::next(PasswordRecord& record) {
    while (read_line(in_, line_)) {
        ++stats_.total_lines;
        std::string_view text = line_;
        std::uint64_t count = 1;
        if (weighted_) {
            const auto tab = text.rfind('\t');
            if (tab == std::string_view::npos) {
                ++stats_.rejected_encoding;
                continue;
            }
            const auto count_text = text.substr(tab + 1);
            const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
            if (count_text.empty() || ec != std::errc{} || ptr != count_text.data() + count_text.size() || count == 0) {
                ++stats_.rejected_encoding;
                continue;
            }
            text = text.substr(0, tab);
        }
        if (!valid_utf8(text)) {
            ++stats_.rejected_encoding;
            continue;
        }
        // Length is counted in characters; non-ASCII text is rejected below anyway.
        std::size_t chars = 0;
        for (char ch : text) {
            if ((static_cast<unsigned char>(ch) & 0xc0) != 0x80) ++chars;
        }
        if (chars < policy_.min_len() || chars > policy_.max_len()) {
            ++stats_.rejected_length;
            continue;
        }
        bool ok = true;
        for (char ch : text) {
            if (!policy_.allows(ch)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++stats_.rejected_charset;
            continue;
        }
        ++stats_.accepted;
        record.text.assign(text);
        record.count = count;
        return true;
    }
    return false;
}

LoadedWordlist load_wordlist(const std::string& path, const CharsetPolicy& policy, bool weighted) {
    InputFile in(path);
    WordlistReader reader(in.stream(), policy, weighted);
    LoadedWordlist out;
    PasswordRecord record;
    while (reader.next(record)) out.records.push_back(record);
    out.stats = reader.stats();
    return out;
}

std::vector<PasswordRecord> dedup_stream(const std::vector<PasswordRecord>& records) {
    std::vector<PasswordRecord> out;
    std::unordered_map<std::string_view, std::size_t> index;
    index.reserve(records.size());
    out.reserve(records.size());
    for (const auto& record : records) {
        // Views point into `records`, which outlives the map.
        const auto [it, inserted] = index.try_emplace(record.text, out.size());
        if (inserted) {
            out.push_back(record);
        } else {
            out[it->second].count += record.count;
        }
    }
    return out;
}

CorpusSplit split_corpus(std::vector<PasswordRecord> records, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("split ratio must be in (0, 1), got " + format_double(ratio));
    if (records.empty()) throw DataError("cannot split an empty corpus");

    Prng rng(seed);
    for (std::size_t i = records.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(records[i], records[j]);
    }
    const auto n = records.size();
    const auto n_train = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9)));

    CorpusSplit split;
    split.seed = seed;
    split.ratio = ratio;
    split.train.assign(std::make_move_iterator(records.begin()), std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(n_train)));
    split.test.assign(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(n_train)), std::make_move_iterator(records.end()));
    return split;
}

std::vector<PasswordRecord> prepare_cross_eval(const std::vector<PasswordRecord>& test,
                                               const std::vector<PasswordRecord>& exclude_train,
                                               const CharsetPolicy& policy) {
    std::unordered_set<std::string_view> excluded;
    excluded.reserve(exclude_train.size());
    for (const auto& record : exclude_train) excluded.insert(record.text);

    std::vector<PasswordRecord> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& record : test) {
        if (!policy.admits(record.text) || excluded.contains(record.text)) continue;
        if (seen.insert(record.text).second) out.push_back({record.text, 1});
    }
    return out;
}

void write_wordlist(std::ostream& out, const std::vector<PasswordRecord>& records, bool weighted) {
    for (const auto& record : records) {
        out << record.text;
        if (weighted) out << '\t' << record.count;
        out << '\n';
    }
}

std::uint64_t total_count(const std::vector<PasswordRecord>& records) {
    std::uint64_t total = 0;
    for (const auto& record : records) total += record.count;
    return total;
}

}  // namespace pwbench
