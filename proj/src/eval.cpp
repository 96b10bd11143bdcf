#include "pwbench/eval.hpp"

#include "pwbench/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include <unistd.h>

namespace pwbench {

namespace {

void check_checkpoints(const std::vector<std::uint64_t>& checkpoints) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
            throw DataError("checkpoints must be positive and strictly increasing");
        }
    }
}

std::string render_u128_fraction(unsigned __int128 num, unsigned __int128 den, int digits) {
    unsigned __int128 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    // num <= 2 * den for L1 distances, so num * scale stays far below 2^128 for realistic totals.
    const unsigned __int128 scaled = (num * scale * 2 + den) / (2 * den);
    const auto whole = static_cast<std::uint64_t>(scaled / scale);
    const auto frac = static_cast<std::uint64_t>(scaled % scale);
    std::string out = std::to_string(whole);
    if (digits > 0) {
        const std::string f = std::to_string(frac);
        out += '.';
        out.append(static_cast<std::size_t>(digits) - f.size(), '0');
        out += f;
    }
    return out;
}

}  // namespace

Matcher build_matcher(const std::vector<PasswordRecord>& test) {
    StringSet set;
    set.reserve(test.size());
    for (const auto& record : test) set.insert(record.text);
    return Matcher(std::move(set));
}

Matcher build_matcher(const CandidateSource& test) {
    StringSet set;
    std::string line;
    while (test(line)) set.insert(line);
    return Matcher(std::move(set));
}

std::string MatchLedger::fraction(const LedgerRow& row) const {
    if (test_size == 0) return format_fraction(0, 1);
    return format_fraction(row.matched, test_size);
}

void MatchLedger::write_tsv(std::ostream& out) const {
    out << "generated\tunique\tmatched\tmatched_fraction\n";
    for (const auto& row : rows) {
        out << row.generated << '\t' << row.unique << '\t' << row.matched << '\t' << fraction(row) << '\n';
    }
}

void MatchLedger::write_json(std::ostream& out) const {
    nlohmann::ordered_json doc;
    doc["test_size"] = test_size;
    doc["checkpoints"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json entry;
        entry["generated"] = row.generated;
        entry["unique"] = row.unique;
        entry["matched"] = row.matched;
        entry["matched_fraction"] = fraction(row);
        entry["final"] = row.final;
        doc["checkpoints"].push_back(std::move(entry));
    }
    out << doc.dump(2) << '\n';
}

MatchLedger match_stream(const CandidateSource& candidates, const Matcher& matcher, const MatchOptions& options,
                         std::vector<std::string>* matched_out) {
    check_checkpoints(options.checkpoints);
    MatchLedger ledger;
    ledger.test_size = matcher.size();
    StringSet seen(options.max_unique);
    StringSet matched;
    LedgerRow current;
    std::size_t next_checkpoint = 0;
    std::string candidate;
    const bool bounded = !options.checkpoints.empty();
    while ((!bounded || next_checkpoint < options.checkpoints.size()) && candidates(candidate)) {
        ++current.generated;
        if (seen.insert(candidate)) {
            ++current.unique;
            if (matcher.contains(candidate) && matched.insert(candidate)) {
                ++current.matched;
                if (matched_out) matched_out->push_back(candidate);
            }
        }
        if (bounded && current.generated == options.checkpoints[next_checkpoint]) {
            ledger.rows.push_back(current);
            ++next_checkpoint;
        }
    }
    if (!bounded || next_checkpoint < options.checkpoints.size()) {
        current.final = true;
        ledger.rows.push_back(current);
    }
    return ledger;
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_entry(std::ofstream& out, std::uint64_t index, std::string_view text) {
    const auto len = static_cast<std::uint32_t>(text.size());
    out.write(reinterpret_cast<const char*>(&index), sizeof index);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

bool read_entry(std::ifstream& in, std::uint64_t& index, std::string& text) {
    std::uint32_t len = 0;
    if (!in.read(reinterpret_cast<char*>(&index), sizeof index)) return false;
    if (!in.read(reinterpret_cast<char*>(&len), sizeof len)) throw DataError("truncated partition file");
    text.resize(len);
    if (!in.read(text.data(), len)) throw DataError("truncated partition file");
    return true;
}

}  // namespace

MatchLedger match_stream_partitioned(const CandidateSource& candidates, const std::string& test_path,
                                     const MatchOptions& options, std::size_t partitions, const std::string& tmp_dir,
                                     std::vector<std::string>* matched_out) {
    check_checkpoints(options.checkpoints);
    if (partitions < 1) throw DataError("partition count must be >= 1");
    namespace fs = std::filesystem;
    static std::atomic<unsigned> run_counter{0};
    const fs::path root = fs::path(tmp_dir) / ("pwbench-match-" + std::to_string(::getpid()) + "-" + std::to_string(run_counter++));
    fs::create_directories(root);
    struct Cleanup {
        fs::path path;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(path, ec);
        }
    } cleanup{root};

    const auto cand_path = [&](std::size_t p) { return root / ("cand-" + std::to_string(p)); };
    const auto test_part_path = [&](std::size_t p) { return root / ("test-" + std::to_string(p)); };

    // Pass one: scatter.
    std::uint64_t generated = 0;
    {
        std::vector<std::ofstream> cand_files;
        std::vector<std::ofstream> test_files;
        for (std::size_t p = 0; p < partitions; ++p) {
            cand_files.emplace_back(cand_path(p), std::ios::binary);
            test_files.emplace_back(test_part_path(p), std::ios::binary);
            if (!cand_files.back() || !test_files.back()) throw DataError("cannot create partition files under " + tmp_dir);
        }
        const std::uint64_t stop = options.checkpoints.empty() ? ~std::uint64_t{0} : options.checkpoints.back();
        std::string line;
        while (generated < stop && candidates(line)) {
            write_entry(cand_files[fnv1a(line) % partitions], generated, line);
            ++generated;
        }
        InputFile test(test_path);
        while (read_line(test.stream(), line)) {
            if (!line.empty()) write_entry(test_files[fnv1a(line) % partitions], 0, line);
        }
        for (auto& f : cand_files) {
            f.close();
            if (!f) throw DataError("failed writing candidate partition");
        }
        for (auto& f : test_files) {
            f.close();
            if (!f) throw DataError("failed writing test partition");
        }
    }

    // Pass two: per-partition dedup and match, binned by checkpoint.
    const auto& cps = options.checkpoints;
    const std::size_t bins = cps.size() + 1;
    std::vector<std::uint64_t> unique_bins(bins, 0);
    std::vector<std::uint64_t> match_bins(bins, 0);
    const auto bin_of = [&](std::uint64_t index) {
        return static_cast<std::size_t>(std::upper_bound(cps.begin(), cps.end(), index) - cps.begin());
    };
    std::uint64_t test_size = 0;
    std::vector<std::pair<std::uint64_t, std::string>> matched;
    std::uint64_t unique_total = 0;
    for (std::size_t p = 0; p < partitions; ++p) {
        StringSet test_set;
        {
            std::ifstream in(test_part_path(p), std::ios::binary);
            std::uint64_t ignored = 0;
            std::string text;
            while (read_entry(in, ignored, text)) test_set.insert(text);
        }
        test_size += test_set.size();
        StringSet seen;
        std::ifstream in(cand_path(p), std::ios::binary);
        std::uint64_t index = 0;
        std::string text;
        while (read_entry(in, index, text)) {
            if (!seen.insert(text)) continue;
            if (options.max_unique > 0 && ++unique_total > options.max_unique) {
                throw ResourceLimitError("unique-string cap of " + std::to_string(options.max_unique) + " entries exceeded");
            }
            ++unique_bins[bin_of(index)];
            if (test_set.contains(text)) {
                ++match_bins[bin_of(index)];
                if (matched_out) matched.emplace_back(index, text);
            }
        }
    }

    MatchLedger ledger;
    ledger.test_size = test_size;
    LedgerRow row;
    for (std::size_t i = 0; i < cps.size() && cps[i] <= generated; ++i) {
        row.generated = cps[i];
        row.unique += unique_bins[i];
        row.matched += match_bins[i];
        ledger.rows.push_back(row);
    }
    if (cps.empty() || generated < cps.back()) {
        row = LedgerRow{generated, 0, 0, true};
        for (std::size_t i = 0; i < bins; ++i) {
            row.unique += unique_bins[i];
            row.matched += match_bins[i];
        }
        ledger.rows.push_back(row);
    }
    if (matched_out) {
        std::sort(matched.begin(), matched.end());
        for (auto& [index, text] : matched) matched_out->push_back(std::move(text));
    }
    return ledger;
}

void RuleAugmentedReport::write_tsv(std::ostream& out) const {
    out << "ruleset\tN0\tN0_unique\tM0\tN_rules_attempted\tN_rules_produced\tN_rules\tM_rules\tM0_fraction\tM_rules_fraction\n";
    const auto frac = [&](std::uint64_t m) { return test_size == 0 ? format_fraction(0, 1) : format_fraction(m, test_size); };
    out << ruleset << '\t' << generated << '\t' << unique << '\t' << matched << '\t' << rules_attempted << '\t' << rules_produced << '\t'
        << rules_unique << '\t' << rules_matched << '\t' << frac(matched) << '\t' << frac(rules_matched) << '\n';
}

RuleAugmentedReport rule_augmented_match(const CandidateSource& candidates, const RuleSet& ruleset, const Matcher& matcher,
                                         unsigned threads, std::size_t max_unique) {
    RuleAugmentedReport report;
    report.ruleset = ruleset.name;
    report.test_size = matcher.size();

    StringSet unique_set(max_unique);
    std::vector<std::string_view> unique;
    StringSet matched;
    std::string candidate;
    while (candidates(candidate)) {
        ++report.generated;
        const auto [view, inserted] = unique_set.emplace(candidate);
        if (!inserted) continue;
        unique.push_back(view);
        if (matcher.contains(view)) matched.insert(view);
    }
    report.unique = unique.size();
    report.matched = matched.size();

    std::size_t next_word = 0;
    CandidateSource words = [&](std::string& out) {
        if (next_word >= unique.size()) return false;
        out.assign(unique[next_word++]);
        return true;
    };
    RuleExpander expander(ruleset, words, true, threads, max_unique);
    while (expander.next(candidate)) {
        if (matcher.contains(candidate)) matched.insert(candidate);
    }
    report.rules_attempted = expander.stats().attempted;
    report.rules_produced = expander.stats().produced;
    report.rules_unique = expander.stats().emitted;
    report.rules_matched = matched.size();
    return report;
}

std::string IntersectionReport::mask_text(std::size_t mask) const {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) out += (mask >> i) & 1U ? '1' : '0';
    return out;
}

void IntersectionReport::write_tsv(std::ostream& out) const {
    out << "region\tcount\n";
    for (std::size_t mask = 1; mask < regions.size(); ++mask) out << mask_text(mask) << '\t' << regions[mask] << '\n';
}

void IntersectionReport::write_summary(std::ostream& out) const {
    out << "sets:";
    for (std::size_t i = 0; i < labels.size(); ++i) out << ' ' << mask_text(std::size_t{1} << i) << '=' << labels[i];
    out << "\nunion: " << union_size << '\n';
    for (std::size_t mask = 1; mask < regions.size(); ++mask) {
        std::string inside;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if ((mask >> i) & 1U) inside += (inside.empty() ? "" : " & ") + labels[i];
        }
        out << inside << (std::popcount(mask) == 1 ? " only" : "") << ": " << regions[mask] << '\n';
    }
}

IntersectionReport intersections(const std::vector<LabeledSet>& sets) {
    if (sets.size() < 2 || sets.size() > 6) throw DataError("intersections need between 2 and 6 sets, got " + std::to_string(sets.size()));
    IntersectionReport report;
    std::unordered_map<std::string_view, std::uint8_t> membership;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        report.labels.push_back(sets[i].label);
        for (const auto& item : sets[i].items) membership[item] |= static_cast<std::uint8_t>(1U << i);
    }
    report.regions.assign(std::size_t{1} << sets.size(), 0);
    for (const auto& [item, mask] : membership) ++report.regions[mask];
    report.union_size = membership.size();
    return report;
}

TopFrequency top_frequency(const CandidateSource& candidates) {
    std::unordered_map<std::string, std::uint64_t> counts;
    TopFrequency top;
    std::string candidate;
    while (candidates(candidate)) {
        ++counts[candidate];
        ++top.total;
    }
    if (top.total == 0) throw DataError("top frequency of an empty stream");
    for (const auto& [text, count] : counts) {
        if (count > top.count || (count == top.count && text < top.text)) {
            top.text = text;
            top.count = count;
        }
    }
    return top;
}

void Histogram::add(const std::string& key, std::uint64_t weight) {
    counts[key] += weight;
    total += weight;
}

std::string Histogram::fraction(const std::string& key, int digits) const {
    const auto it = counts.find(key);
    if (total == 0 || it == counts.end()) return format_fraction(0, 1, digits);
    return format_fraction(it->second, total, digits);
}

std::string StatComparison::l1_text(int digits) const { return render_u128_fraction(l1_numerator, l1_denominator, digits); }

void StatComparison::write_tsv(std::ostream& out) const {
    std::vector<std::string> keys;
    for (const auto& [key, count] : candidates.counts) keys.push_back(key);
    for (const auto& [key, count] : reference.counts) {
        if (!candidates.counts.contains(key)) keys.push_back(key);
    }
    const bool numeric = std::all_of(keys.begin(), keys.end(), [](const std::string& k) {
        return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) { return c >= '0' && c <= '9'; });
    });
    std::sort(keys.begin(), keys.end(), [numeric](const std::string& a, const std::string& b) {
        if (numeric && a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    out << "key\tcandidate_count\tcandidate_fraction\treference_count\treference_fraction\n";
    for (const auto& key : keys) {
        const auto c = candidates.counts.contains(key) ? candidates.counts.at(key) : 0;
        const auto r = reference.counts.contains(key) ? reference.counts.at(key) : 0;
        out << key << '\t' << c << '\t' << candidates.fraction(key) << '\t' << r << '\t' << reference.fraction(key) << '\n';
    }
}

void StatReport::write_summary(std::ostream& out) const {
    out << "statistic\tl1_distance\n";
    for (const auto* stat : {&pattern, &signature, &segments}) out << stat->name << '\t' << stat->l1_text() << '\n';
    out << "skipped_candidates\t" << skipped << '\n';
}

namespace {

void finish_l1(StatComparison& stat) {
    const auto& a = stat.candidates;
    const auto& b = stat.reference;
    if (a.total == 0 && b.total == 0) {
        stat.l1_numerator = 0;
        stat.l1_denominator = 1;
        return;
    }
    if (a.total == 0 || b.total == 0) {
        stat.l1_numerator = 1;
        stat.l1_denominator = 1;
        return;
    }
    // sum |ca/A - cb/B| = sum |ca*B - cb*A| / (A*B)
    const unsigned __int128 A = a.total;
    const unsigned __int128 B = b.total;
    unsigned __int128 num = 0;
    const auto term = [&](std::uint64_t ca, std::uint64_t cb) {
        const unsigned __int128 x = ca * B;
        const unsigned __int128 y = cb * A;
        num += x > y ? x - y : y - x;
    };
    for (const auto& [key, ca] : a.counts) term(ca, b.counts.contains(key) ? b.counts.at(key) : 0);
    for (const auto& [key, cb] : b.counts) {
        if (!a.counts.contains(key)) term(0, cb);
    }
    stat.l1_numerator = num;
    stat.l1_denominator = A * B;
}

bool printable(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](char ch) {
        const auto c = static_cast<unsigned char>(ch);
        return c >= 0x20 && c <= 0x7e;
    });
}

void add_password(StatReport& report, bool reference, std::string_view text, std::uint64_t weight, const SegmentVocab& vocab) {
    auto pick = [reference](StatComparison& s) -> Histogram& { return reference ? s.reference : s.candidates; };
    pick(report.pattern).add(pattern_template(text).render(), weight);
    pick(report.signature).add(class_signature(text).render(), weight);
    std::string segments;
    try {
        segments = std::to_string(tokenize(text, vocab).size());
    } catch (const std::invalid_argument&) {
        segments = "untokenizable";
    }
    pick(report.segments).add(segments, weight);
}

}  // namespace

StatReport stats_report(const CandidateSource& candidates, const std::vector<PasswordRecord>& reference, const SegmentVocab& vocab) {
    StatReport report;
    report.pattern.name = "pattern";
    report.signature.name = "signature";
    report.segments.name = "segments";
    std::string candidate;
    while (candidates(candidate)) {
        if (!printable(candidate)) {
            ++report.skipped;
            continue;
        }
        add_password(report, false, candidate, 1, vocab);
    }
    for (const auto& record : reference) {
        if (printable(record.text)) add_password(report, true, record.text, record.count, vocab);
    }
    finish_l1(report.pattern);
    finish_l1(report.signature);
    finish_l1(report.segments);
    return report;
}

}  // namespace pwbench
