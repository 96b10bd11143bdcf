#include "pwbench/markov.hpp"

#include "pwbench/error.hpp"
#include "pwbench/io.hpp"
#include "pwbench/random.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace pwbench {

double ContextTable::probability_of(char symbol) const {
    for (const auto& t : transitions) {
        if (t.symbol == symbol) return t.probability;
    }
    return 0.0;
}

NgramModel::NgramModel(unsigned order, double alpha, std::size_t max_len) : order_(order), alpha_(alpha), max_len_(max_len) {
    if (order < 1) throw DataError("n-gram order must be >= 1");
    if (!(alpha >= 0.0)) throw DataError("smoothing constant must be >= 0");
    if (max_len < 1) throw DataError("n-gram max_len must be >= 1");
}

void NgramModel::add(std::string_view password, std::uint64_t count) {
    std::string context(order_ - 1, kBos);
    for (char ch : password) {
        counts_[context][ch] += count;
        if (!context.empty()) {
            context.erase(0, 1);
            context += ch;
        }
    }
    counts_[context][kEos] += count;
}

std::string NgramModel::context_after(std::string_view prefix) const {
    const std::size_t width = order_ - 1;
    std::string context(width, kBos);
    context += prefix;
    return context.substr(context.size() - width);
}

namespace {

ContextTable make_table(const std::map<char, std::uint64_t>* seen, const std::string& support, double alpha) {
    ContextTable table;
    std::uint64_t total = 0;
    if (seen) {
        for (const auto& [symbol, count] : *seen) total += count;
    }
    const double denominator = static_cast<double>(total) + alpha * static_cast<double>(support.size());
    if (denominator > 0.0) {
        if (alpha > 0.0) {
            for (char symbol : support) {
                std::uint64_t count = 0;
                if (seen) {
                    if (const auto it = seen->find(symbol); it != seen->end()) count = it->second;
                }
                table.transitions.push_back({symbol, (static_cast<double>(count) + alpha) / denominator});
            }
        } else if (seen) {
            for (const auto& [symbol, count] : *seen) {
                table.transitions.push_back({symbol, static_cast<double>(count) / denominator});
            }
        }
    }
    std::sort(table.transitions.begin(), table.transitions.end(), [](const auto& a, const auto& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return static_cast<unsigned char>(a.symbol) < static_cast<unsigned char>(b.symbol);
    });
    double running = 0.0;
    for (const auto& t : table.transitions) {
        running += t.probability;
        table.cumulative.push_back(running);
    }
    return table;
}

}  // namespace

void NgramModel::finalize() {
    std::set<char> letters;
    for (const auto& [context, next] : counts_) {
        for (const auto& [symbol, count] : next) {
            if (symbol != kEos) letters.insert(symbol);
        }
    }
    alphabet_.assign(letters.begin(), letters.end());
    std::string support(1, kEos);
    support += alphabet_;

    tables_.clear();
    tables_.reserve(counts_.size());
    for (const auto& [context, next] : counts_) tables_.emplace(context, make_table(&next, support, alpha_));
    unseen_ = counts_.empty() ? ContextTable{} : make_table(nullptr, support, alpha_);
}

const ContextTable& NgramModel::table(std::string_view context) const {
    const auto it = tables_.find(std::string(context));
    return it == tables_.end() ? unseen_ : it->second;
}

namespace {

std::string escape_symbols(std::string_view text) {
    std::string out;
    for (char ch : text) {
        if (ch == kBos) {
            out += "\\x02";
        } else if (ch == kEos) {
            out += "\\x03";
        } else if (ch == '\\') {
            out += "\\\\";
        } else {
            out += ch;
        }
    }
    return out;
}

std::string unescape_symbols(std::string_view text, std::size_t line_no) {
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        const auto rest = text.substr(i);
        if (rest.starts_with("\\\\")) {
            out += '\\';
            i += 1;
        } else if (rest.starts_with("\\x02")) {
            out += kBos;
            i += 3;
        } else if (rest.starts_with("\\x03")) {
            out += kEos;
            i += 3;
        } else {
            throw DataError("model line " + std::to_string(line_no) + ": bad escape");
        }
    }
    return out;
}

}  // namespace

void NgramModel::save(std::ostream& out) const {
    out << "ngram\t" << order_ << '\t' << format_double(alpha_) << '\t' << max_len_ << '\n';
    std::vector<std::string> lines;
    for (const auto& [context, next] : counts_) {
        for (const auto& [symbol, count] : next) {
            lines.push_back(escape_symbols(context) + '\t' + escape_symbols(std::string(1, symbol)) + '\t' + std::to_string(count));
        }
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& line : lines) out << line << '\n';
}

NgramModel NgramModel::load(std::istream& in) {
    std::string line;
    if (!read_line(in, line)) throw DataError("empty n-gram model file");
    const auto header = split_fields(line, '\t');
    if (header.size() != 4 || header[0] != "ngram") throw DataError("not an n-gram model (bad header)");
    double alpha = 0.0;
    try {
        alpha = std::stod(std::string(header[2]));
    } catch (const std::exception&) {
        throw DataError("n-gram model: bad alpha");
    }
    NgramModel model(static_cast<unsigned>(parse_count(header[1])), alpha, parse_count(header[3]));
    std::size_t line_no = 1;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line, '\t');
        if (fields.size() != 3) throw DataError("model line " + std::to_string(line_no) + ": expected context<TAB>next<TAB>count");
        const std::string context = unescape_symbols(fields[0], line_no);
        const std::string next = unescape_symbols(fields[1], line_no);
        if (context.size() != model.order_ - 1 || next.size() != 1) {
            throw DataError("model line " + std::to_string(line_no) + ": context or symbol has the wrong width");
        }
        const auto count = parse_count(fields[2]);
        if (count == 0) throw DataError("model line " + std::to_string(line_no) + ": zero count");
        model.counts_[context][next[0]] += count;
    }
    model.finalize();
    return model;
}

NgramModel train_ngram(const std::vector<PasswordRecord>& records, unsigned order, double alpha, std::size_t max_len) {
    NgramModel model(order, alpha, max_len);
    for (const auto& record : records) model.add(record.text, record.count);
    model.finalize();
    return model;
}

double ngram_prob(const NgramModel& model, std::string_view password) {
    if (password.size() > model.max_len() || model.empty()) return 0.0;
    double p = 1.0;
    for (std::size_t i = 0; i <= password.size(); ++i) {
        const char symbol = i < password.size() ? password[i] : kEos;
        p *= model.table(model.context_after(password.substr(0, i))).probability_of(symbol);
        if (p == 0.0) return 0.0;
    }
    return p;
}

bool NgramEnumerator::Later::operator()(const Node& a, const Node& b) const {
    // priority_queue pops the greatest element; "a < b" means b pops first.
    if (a.probability != b.probability) return a.probability < b.probability;
    if (a.text != b.text) return a.text > b.text;
    return a.terminal < b.terminal;
}

NgramEnumerator::NgramEnumerator(const NgramModel& model, std::uint64_t limit, std::size_t max_frontier)
    : model_(model), limit_(limit), max_frontier_(max_frontier) {
    if (!model.empty()) push_child(std::string(), 1.0, model.table(model.context_after("")), 0);
}

double NgramEnumerator::threshold() const {
    if (limit_ == 0 || best_terminals_.size() < limit_) return 0.0;
    return best_terminals_.top();
}

void NgramEnumerator::push_child(const std::string& base, double base_probability, const ContextTable& table, std::uint32_t from) {
    const bool at_max = base.size() >= model_.max_len();
    for (auto i = from; i < table.transitions.size(); ++i) {
        const auto& t = table.transitions[i];
        const bool terminal = t.symbol == kEos;
        if (terminal ? base.empty() : at_max) continue;
        const double p = base_probability * t.probability;
        if (p < threshold() || p == 0.0) return;
        Node node{p, base_probability, terminal ? base : base + t.symbol, &table, i, terminal};
        if (terminal && limit_ > 0) {
            best_terminals_.push(p);
            if (best_terminals_.size() > limit_) best_terminals_.pop();
        }
        frontier_.push(std::move(node));
        if (max_frontier_ > 0 && frontier_.size() > max_frontier_) {
            throw ResourceLimitError("n-gram enumeration frontier exceeded " + std::to_string(max_frontier_) + " nodes");
        }
        return;
    }
}

std::optional<ScoredCandidate> NgramEnumerator::next() {
    if (limit_ > 0 && emitted_ >= limit_) return std::nullopt;
    while (!frontier_.empty()) {
        Node node = frontier_.top();
        frontier_.pop();
        const std::string base = node.terminal ? node.text : node.text.substr(0, node.text.size() - 1);
        push_child(base, node.base_probability, *node.table, node.child + 1);
        if (node.terminal) {
            ++emitted_;
            return ScoredCandidate{std::move(node.text), node.probability};
        }
        push_child(node.text, node.probability, model_.table(model_.context_after(node.text)), 0);
    }
    return std::nullopt;
}

NgramSampler::NgramSampler(const NgramModel& model, std::uint64_t seed) : model_(model), seed_(seed) {
    if (model.empty()) throw DataError("cannot sample from an empty n-gram model");
}

std::vector<std::string> NgramSampler::block(std::uint64_t index) const {
    constexpr int kMaxAttempts = 1'000'000;
    Prng rng(derive_seed(seed_, index));
    std::vector<std::string> out;
    out.reserve(kSampleBlock);
    std::string text;
    while (out.size() < kSampleBlock) {
        bool done = false;
        for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
            text.clear();
            for (;;) {
                const ContextTable& table = model_.table(model_.context_after(text));
                if (table.transitions.empty()) break;
                const double u = rng.unit() * table.cumulative.back();
                auto pos = static_cast<std::size_t>(std::upper_bound(table.cumulative.begin(), table.cumulative.end(), u) - table.cumulative.begin());
                pos = std::min(pos, table.transitions.size() - 1);
                const char symbol = table.transitions[pos].symbol;
                if (symbol == kEos) {
                    done = !text.empty();
                    break;
                }
                text += symbol;
                if (text.size() > model_.max_len()) break;
            }
        }
        if (!done) throw DataError("n-gram sampler: no sample within max_len after " + std::to_string(kMaxAttempts) + " attempts");
        out.push_back(text);
    }
    return out;
}

std::string NgramSampler::next() {
    if (position_ >= buffer_.size()) {
        buffer_ = block(block_index_++);
        position_ = 0;
    }
    return buffer_[position_++];
}

}  // namespace pwbench
