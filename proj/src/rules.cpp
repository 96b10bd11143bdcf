#include "pwbench/rules.hpp"

#include "pwbench/error.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <istream>
#include <unordered_set>

namespace pwbench {

namespace {

enum class Operands { None, Position, Char, TwoChars };

std::optional<Operands> operands_of(char opcode) {
    switch (static_cast<RuleOp>(opcode)) {
        case RuleOp::Noop:
        case RuleOp::Lower:
        case RuleOp::Upper:
        case RuleOp::Capitalize:
        case RuleOp::InvertCapitalize:
        case RuleOp::ToggleAll:
        case RuleOp::Reverse:
        case RuleOp::Duplicate:
        case RuleOp::Reflect:
        case RuleOp::RotateLeft:
        case RuleOp::RotateRight:
        case RuleOp::DeleteFirst:
        case RuleOp::DeleteLast: return Operands::None;
        case RuleOp::ToggleAt:
        case RuleOp::DuplicateN:
        case RuleOp::DeleteAt:
        case RuleOp::TruncateAt:
        case RuleOp::DuplicateFirstN:
        case RuleOp::DuplicateLastN: return Operands::Position;
        case RuleOp::Append:
        case RuleOp::Prepend:
        case RuleOp::Purge: return Operands::Char;
        case RuleOp::Substitute: return Operands::TwoChars;
    }
    return std::nullopt;
}

char encode_position(std::uint8_t n) { return n < 10 ? static_cast<char>('0' + n) : static_cast<char>('A' + n - 10); }

std::optional<std::uint8_t> decode_position(char c) {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'A' && c <= 'Z') return static_cast<std::uint8_t>(c - 'A' + 10);
    return std::nullopt;
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
char to_upper(char c) { return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c; }
char toggle(char c) { return (c >= 'a' && c <= 'z') ? to_upper(c) : to_lower(c); }

}  // namespace

std::string RulePrimitive::render() const {
    std::string out(1, static_cast<char>(op));
    switch (*operands_of(static_cast<char>(op))) {
        case Operands::None: break;
        case Operands::Position: out += encode_position(n); break;
        case Operands::Char: out += from; break;
        case Operands::TwoChars:
            out += from;
            out += to;
            break;
    }
    return out;
}

std::string RuleChain::render() const {
    std::string out;
    for (const auto& primitive : primitives) {
        if (!out.empty()) out += ' ';
        out += primitive.render();
    }
    return out;
}

std::optional<RuleChain> parse_rule_line(std::string_view text, std::size_t line_no) {
    std::size_t first = 0;
    while (first < text.size() && is_blank(text[first])) ++first;
    if (first == text.size() || text[first] == '#') return std::nullopt;

    RuleChain chain;
    chain.source_text = std::string(text);
    std::size_t i = first;
    while (i < text.size()) {
        if (is_blank(text[i])) {
            ++i;
            continue;
        }
        const std::size_t column = i + 1;
        const char opcode = text[i++];
        const auto kind = operands_of(opcode);
        if (!kind) throw RuleParseError(line_no, column, std::string("unknown or unsupported opcode '") + opcode + "'");
        RulePrimitive primitive;
        primitive.op = static_cast<RuleOp>(opcode);
        const auto need = [&](std::size_t count) {
            if (i + count > text.size()) throw RuleParseError(line_no, column, std::string("opcode '") + opcode + "' is missing an operand");
        };
        switch (*kind) {
            case Operands::None: break;
            case Operands::Position: {
                need(1);
                const auto n = decode_position(text[i]);
                if (!n) throw RuleParseError(line_no, i + 1, std::string("bad position operand '") + text[i] + "' (expected 0-9 or A-Z)");
                primitive.n = *n;
                ++i;
                break;
            }
            case Operands::Char:
                need(1);
                primitive.from = text[i++];
                break;
            case Operands::TwoChars:
                need(2);
                primitive.from = text[i++];
                primitive.to = text[i++];
                break;
        }
        chain.primitives.push_back(primitive);
    }
    return chain;
}

std::optional<std::string> apply_chain(const RuleChain& chain, std::string_view word) {
    if (word.size() > kMaxRuleBuffer) return std::nullopt;
    std::string buf(word);
    for (const auto& p : chain.primitives) {
        const std::size_t len = buf.size();
        switch (p.op) {
            case RuleOp::Noop: break;
            case RuleOp::Lower: std::transform(buf.begin(), buf.end(), buf.begin(), to_lower); break;
            case RuleOp::Upper: std::transform(buf.begin(), buf.end(), buf.begin(), to_upper); break;
            case RuleOp::Capitalize:
                if (len > 0) buf[0] = to_upper(buf[0]);
                break;
            case RuleOp::InvertCapitalize:
                std::transform(buf.begin(), buf.end(), buf.begin(), to_upper);
                if (len > 0) buf[0] = to_lower(buf[0]);
                break;
            case RuleOp::ToggleAll: std::transform(buf.begin(), buf.end(), buf.begin(), toggle); break;
            case RuleOp::ToggleAt:
                if (p.n >= len) return std::nullopt;
                buf[p.n] = toggle(buf[p.n]);
                break;
            case RuleOp::Reverse: std::reverse(buf.begin(), buf.end()); break;
            case RuleOp::Duplicate:
                if (2 * len > kMaxRuleBuffer) return std::nullopt;
                buf += buf;
                break;
            case RuleOp::DuplicateN: {
                if ((p.n + 1U) * len > kMaxRuleBuffer) return std::nullopt;
                const std::string once = buf;
                for (unsigned k = 0; k < p.n; ++k) buf += once;
                break;
            }
            case RuleOp::Reflect:
                if (2 * len > kMaxRuleBuffer) return std::nullopt;
                buf.append(buf.rbegin(), buf.rend());
                break;
            case RuleOp::RotateLeft:
                if (len > 1) std::rotate(buf.begin(), buf.begin() + 1, buf.end());
                break;
            case RuleOp::RotateRight:
                if (len > 1) std::rotate(buf.begin(), buf.end() - 1, buf.end());
                break;
            case RuleOp::Append: buf += p.from; break;
            case RuleOp::Prepend: buf.insert(buf.begin(), p.from); break;
            case RuleOp::DeleteFirst:
                if (len == 0) return std::nullopt;
                buf.erase(0, 1);
                break;
            case RuleOp::DeleteLast:
                if (len == 0) return std::nullopt;
                buf.pop_back();
                break;
            case RuleOp::DeleteAt:
                if (p.n >= len) return std::nullopt;
                buf.erase(p.n, 1);
                break;
            case RuleOp::TruncateAt:
                if (p.n >= len) return std::nullopt;
                buf.resize(p.n);
                break;
            case RuleOp::Substitute: std::replace(buf.begin(), buf.end(), p.from, p.to); break;
            case RuleOp::Purge: buf.erase(std::remove(buf.begin(), buf.end(), p.from), buf.end()); break;
            case RuleOp::DuplicateFirstN:
                if (len == 0) return std::nullopt;
                buf.insert(std::size_t{0}, std::size_t{p.n}, buf[0]);
                break;
            case RuleOp::DuplicateLastN:
                if (len == 0) return std::nullopt;
                buf.append(std::size_t{p.n}, buf.back());
                break;
        }
        if (buf.size() > kMaxRuleBuffer) return std::nullopt;
    }
    if (buf.empty()) return std::nullopt;
    return buf;
}

RuleSet RuleSet::parse(std::istream& in, std::string name) {
    RuleSet set;
    set.name = std::move(name);
    std::unordered_set<std::string> rendered;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line)) {
        ++line_no;
        auto chain = parse_rule_line(line, line_no);
        if (!chain) continue;
        if (rendered.insert(chain->render()).second) set.chains.push_back(std::move(*chain));
    }
    return set;
}

RuleSet RuleSet::load(const std::string& path) {
    InputFile in(path);
    return parse(in.stream(), path == "-" ? "stdin" : std::filesystem::path(path).stem().string());
}

RuleExpander::RuleExpander(const RuleSet& ruleset, CandidateSource words, bool dedup, unsigned threads, std::size_t max_unique)
    : ruleset_(ruleset), words_(std::move(words)), dedup_(dedup), threads_(std::max(1U, threads)), seen_(max_unique) {}

namespace {

constexpr std::size_t kWordBatch = 4096;

std::vector<std::optional<std::string>> expand_range(const RuleSet& ruleset, const std::vector<std::string>& words,
                                                     std::size_t begin, std::size_t end) {
    std::vector<std::optional<std::string>> out;
    out.reserve((end - begin) * ruleset.chains.size());
    for (std::size_t w = begin; w < end; ++w) {
        for (const auto& chain : ruleset.chains) out.push_back(apply_chain(chain, words[w]));
    }
    return out;
}

}  // namespace

bool RuleExpander::refill() {
    std::vector<std::string> words;
    std::string word;
    while (words.size() < kWordBatch && !exhausted_) {
        if (words_(word)) {
            words.push_back(word);
        } else {
            exhausted_ = true;
        }
    }
    if (words.empty()) return false;

    std::vector<std::vector<std::optional<std::string>>> parts;
    const unsigned workers = std::min<unsigned>(threads_, static_cast<unsigned>(words.size()));
    if (workers <= 1) {
        parts.push_back(expand_range(ruleset_, words, 0, words.size()));
    } else {
        std::vector<std::future<std::vector<std::optional<std::string>>>> futures;
        const std::size_t chunk = (words.size() + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t) {
            const std::size_t begin = std::min(words.size(), t * chunk);
            const std::size_t end = std::min(words.size(), begin + chunk);
            futures.push_back(std::async(std::launch::async, expand_range, std::cref(ruleset_), std::cref(words), begin, end));
        }
        for (auto& f : futures) parts.push_back(f.get());
    }

    stats_.words += words.size();
    stats_.attempted += words.size() * ruleset_.chains.size();
    batch_.clear();
    position_ = 0;
    for (auto& part : parts) {
        for (auto& result : part) {
            if (!result) {
                ++stats_.rejected;
                continue;
            }
            ++stats_.produced;
            if (dedup_ && !seen_.insert(*result)) continue;
            batch_.push_back(std::move(*result));
        }
    }
    return true;
}

bool RuleExpander::next(std::string& out) {
    while (position_ >= batch_.size()) {
        if (!refill()) return false;
    }
    out = std::move(batch_[position_++]);
    ++stats_.emitted;
    return true;
}

std::vector<std::string> apply_ruleset(const RuleSet& ruleset, const std::vector<PasswordRecord>& words, bool dedup,
                                       RuleExpansionStats* stats) {
    std::size_t record = 0;
    std::uint64_t repeat = 0;
    CandidateSource source = [&](std::string& out) {
        while (record < words.size()) {
            if (repeat < words[record].count) {
                ++repeat;
                out = words[record].text;
                return true;
            }
            ++record;
            repeat = 0;
        }
        return false;
    };
    RuleExpander expander(ruleset, source, dedup);
    std::vector<std::string> out;
    std::string candidate;
    while (expander.next(candidate)) out.push_back(candidate);
    if (stats) *stats = expander.stats();
    return out;
}

}  // namespace pwbench
