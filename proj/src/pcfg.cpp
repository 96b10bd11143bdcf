#include "pwbench/pcfg.hpp"

#include "pwbench/error.hpp"
#include "pwbench/io.hpp"
#include "pwbench/random.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace pwbench {

void StructureModel::add(std::string_view password, std::uint64_t count) {
    if (password.empty()) return;
    template_counts_[pattern_template(password).render()] += count;
    for (auto& segment : split_segments(password)) {
        terminal_counts_[{segment.cls, segment.text.size()}][segment.text] += count;
    }
}

void StructureModel::finalize() {
    terminals_.clear();
    for (const auto& [key, texts] : terminal_counts_) {
        TerminalList list;
        for (const auto& [text, count] : texts) {
            list.items.push_back({text, count, 0.0});
            list.total += count;
        }
        for (auto& item : list.items) item.probability = static_cast<double>(item.count) / static_cast<double>(list.total);
        std::sort(list.items.begin(), list.items.end(), [](const Terminal& a, const Terminal& b) {
            if (a.probability != b.probability) return a.probability > b.probability;
            return a.text < b.text;
        });
        std::uint64_t running = 0;
        for (std::size_t i = 0; i < list.items.size(); ++i) {
            list.index.emplace(list.items[i].text, static_cast<std::uint32_t>(i));
            running += list.items[i].count;
            list.cumulative.push_back(running);
        }
        terminals_.emplace(key, std::move(list));
    }

    templates_.clear();
    template_index_.clear();
    template_total_ = 0;
    for (const auto& [pattern, count] : template_counts_) template_total_ += count;
    for (const auto& [pattern, count] : template_counts_) {
        TemplateEntry entry;
        entry.pattern = PatternTemplate::parse(pattern);
        entry.count = count;
        entry.probability = static_cast<double>(count) / static_cast<double>(template_total_);
        for (const auto& run : entry.pattern.runs) {
            const auto it = terminals_.find({run.cls, run.length});
            if (it == terminals_.end()) {
                throw DataError("template " + pattern + " needs terminals for " + class_symbol(run.cls) + std::to_string(run.length));
            }
            entry.slots.push_back(&it->second);
        }
        templates_.push_back(std::move(entry));
    }
    std::sort(templates_.begin(), templates_.end(), [](const TemplateEntry& a, const TemplateEntry& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.pattern.render() < b.pattern.render();
    });
    for (std::size_t i = 0; i < templates_.size(); ++i) template_index_.emplace(templates_[i].pattern.render(), i);
}

const TerminalList* StructureModel::terminals(TerminalKey key) const {
    const auto it = terminals_.find(key);
    return it == terminals_.end() ? nullptr : &it->second;
}

void StructureModel::save_templates(std::ostream& out) const {
    for (const auto& entry : templates_) out << entry.pattern.render() << '\t' << entry.count << '\n';
}

void StructureModel::save_terminals(std::ostream& out) const {
    for (const auto& [key, list] : terminals_) {
        for (const auto& item : list.items) {
            out << class_symbol(key.cls) << '\t' << key.length << '\t' << item.text << '\t' << item.count << '\n';
        }
    }
}

StructureModel StructureModel::load(std::istream& templates, std::istream& terminals) {
    StructureModel model;
    std::string line;
    std::size_t line_no = 0;
    while (read_line(templates, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line, '\t');
        if (fields.size() != 2) throw DataError("templates line " + std::to_string(line_no) + ": expected pattern<TAB>count");
        const auto pattern = PatternTemplate::parse(fields[0]);
        const auto count = parse_count(fields[1]);
        if (count == 0) throw DataError("templates line " + std::to_string(line_no) + ": zero count");
        model.template_counts_[pattern.render()] += count;
    }
    line_no = 0;
    while (read_line(terminals, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line, '\t');
        if (fields.size() != 4 || fields[0].size() != 1) {
            throw DataError("terminals line " + std::to_string(line_no) + ": expected class<TAB>length<TAB>text<TAB>count");
        }
        const TerminalKey key{class_from_symbol(fields[0][0]), parse_count(fields[1])};
        const std::string text(fields[2]);
        const auto count = parse_count(fields[3]);
        bool shape_ok = text.size() == key.length && count > 0;
        for (char ch : text) {
            if (!shape_ok) break;
            try {
                shape_ok = char_class(ch) == key.cls;
            } catch (const std::invalid_argument&) {
                shape_ok = false;
            }
        }
        if (!shape_ok) throw DataError("terminals line " + std::to_string(line_no) + ": terminal does not match its class/length or has zero count");
        model.terminal_counts_[key][text] += count;
    }
    model.finalize();
    return model;
}

void StructureModel::save_dir(const std::string& dir) const {
    OutputFile templates(dir + "/templates.tsv");
    save_templates(templates.stream());
    templates.close();
    OutputFile terminals(dir + "/terminals.tsv");
    save_terminals(terminals.stream());
    terminals.close();
}

StructureModel StructureModel::load_dir(const std::string& dir) {
    InputFile templates(dir + "/templates.tsv");
    InputFile terminals(dir + "/terminals.tsv");
    return load(templates.stream(), terminals.stream());
}

StructureModel train_structure(const std::vector<PasswordRecord>& records) {
    if (records.empty()) throw DataError("cannot train a structure model on an empty stream");
    StructureModel model;
    for (const auto& record : records) model.add(record.text, record.count);
    model.finalize();
    return model;
}

double structure_prob(const StructureModel& model, std::string_view password) {
    if (password.empty()) return 0.0;
    for (char ch : password) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x20 || c > 0x7e) return 0.0;
    }
    const auto it = model.template_index_.find(pattern_template(password).render());
    if (it == model.template_index_.end()) return 0.0;
    const TemplateEntry& entry = model.templates_[it->second];
    double p = entry.probability;
    const auto segments = split_segments(password);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const TerminalList& list = *entry.slots[i];
        const auto t = list.index.find(segments[i].text);
        if (t == list.index.end()) return 0.0;
        p *= list.items[t->second].probability;
    }
    return p;
}

StructureEnumerator::StructureEnumerator(const StructureModel& model, std::uint64_t limit, std::size_t max_frontier)
    : model_(model), limit_(limit), max_frontier_(max_frontier) {
    for (std::uint32_t t = 0; t < model.templates().size(); ++t) {
        push(t, std::vector<std::uint32_t>(model.templates()[t].slots.size(), 0));
    }
}

void StructureEnumerator::push(std::uint32_t template_index, std::vector<std::uint32_t> ranks) {
    std::string key(reinterpret_cast<const char*>(&template_index), sizeof template_index);
    key.append(reinterpret_cast<const char*>(ranks.data()), ranks.size() * sizeof(std::uint32_t));
    if (!seen_.insert(std::move(key)).second) return;

    const TemplateEntry& entry = model_.templates()[template_index];
    Entry e{entry.probability, std::string(), template_index, std::move(ranks)};
    for (std::size_t i = 0; i < entry.slots.size(); ++i) {
        const Terminal& terminal = entry.slots[i]->items[e.ranks[i]];
        e.probability *= terminal.probability;
        e.text += terminal.text;
    }
    frontier_.push(std::move(e));
    if (max_frontier_ > 0 && frontier_.size() > max_frontier_) {
        throw ResourceLimitError("structure enumeration frontier exceeded " + std::to_string(max_frontier_) + " entries");
    }
}

std::optional<ScoredCandidate> StructureEnumerator::next() {
    if (frontier_.empty() || (limit_ > 0 && emitted_ >= limit_)) return std::nullopt;
    Entry top = frontier_.top();
    frontier_.pop();
    const TemplateEntry& entry = model_.templates()[top.template_index];
    for (std::size_t i = 0; i < top.ranks.size(); ++i) {
        if (top.ranks[i] + 1 < entry.slots[i]->items.size()) {
            auto ranks = top.ranks;
            ++ranks[i];
            push(top.template_index, std::move(ranks));
        }
    }
    ++emitted_;
    return ScoredCandidate{std::move(top.text), top.probability};
}

StructureSampler::StructureSampler(const StructureModel& model, std::uint64_t seed) : model_(model), seed_(seed) {
    if (model.templates().empty()) throw DataError("cannot sample from an empty structure model");
    std::uint64_t running = 0;
    for (const auto& entry : model.templates()) {
        running += entry.count;
        template_cumulative_.push_back(running);
    }
}

namespace {

std::size_t pick(const std::vector<std::uint64_t>& cumulative, std::uint64_t draw) {
    return static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), draw) - cumulative.begin());
}

}  // namespace

std::vector<std::string> StructureSampler::block(std::uint64_t index) const {
    Prng rng(derive_seed(seed_, index));
    std::vector<std::string> out;
    out.reserve(kSampleBlock);
    for (std::size_t n = 0; n < kSampleBlock; ++n) {
        const auto& entry = model_.templates()[pick(template_cumulative_, rng.below(template_cumulative_.back()))];
        std::string text;
        for (const TerminalList* slot : entry.slots) {
            text += slot->items[pick(slot->cumulative, rng.below(slot->total))].text;
        }
        out.push_back(std::move(text));
    }
    return out;
}

std::string StructureSampler::next() {
    if (position_ >= buffer_.size()) {
        buffer_ = block(block_index_++);
        position_ = 0;
    }
    return buffer_[position_++];
}

}  // namespace pwbench
