#include "pwbench/cli.hpp"

#include "pwbench/corpus.hpp"
#include "pwbench/error.hpp"
#include "pwbench/eval.hpp"
#include "pwbench/io.hpp"
#include "pwbench/markov.hpp"
#include "pwbench/pcfg.hpp"
#include "pwbench/prince.hpp"
#include "pwbench/rules.hpp"
#include "pwbench/segmentation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace pwbench::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunConfig

std::string RunConfig::serialize() const {
    std::string out = "# pwbench run manifest\n";
    out += "format=" + std::string(kManifestFormat) + '\n';
    out += "version=" + version + '\n';
    out += "command=" + command + '\n';
    for (const auto& [name, value] : options) out += "option." + name + '=' + value + '\n';
    for (const auto& [name, digest] : inputs) out += "input." + name + '=' + digest + '\n';
    return out;
}

RunConfig RunConfig::parse(std::string_view text) {
    RunConfig config;
    config.version.clear();
    bool have_format = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("manifest line " + std::to_string(line_no) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "format") {
            if (value != kManifestFormat) throw DataError("unsupported manifest format '" + value + "'");
            have_format = true;
        } else if (key == "version") {
            config.version = std::move(value);
        } else if (key == "command") {
            config.command = std::move(value);
        } else if (key.starts_with("option.")) {
            config.options.emplace_back(key.substr(7), std::move(value));
        } else if (key.starts_with("input.")) {
            config.inputs.emplace_back(key.substr(6), std::move(value));
        } else {
            throw DataError("manifest line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!have_format || config.command.empty()) throw DataError("manifest lacks format or command");
    return config;
}

RunConfig RunConfig::load(const std::string& path) {
    InputFile in(path);
    std::ostringstream text;
    text << in.stream().rdbuf();
    return parse(text.str());
}

std::string RunConfig::value(std::string_view name) const {
    std::string found;
    for (const auto& [key, value] : options) {
        if (key == name) found = value;
    }
    return found;
}

std::vector<std::string> RunConfig::to_args() const {
    std::vector<std::string> args{command};
    for (const auto& [name, value] : options) {
        args.push_back("--" + name);
        if (value != "true") args.push_back(value);
    }
    return args;
}

std::string input_digest(const std::string& path) {
    if (path == "-") return "stdin";
    if (fs::is_directory(path)) {
        std::string out;
        for (const char* name : {"templates.tsv", "terminals.tsv"}) {
            const auto file = fs::path(path) / name;
            if (!fs::exists(file)) continue;
            out += (out.empty() ? "" : ",") + std::string(name) + ":sha256:" + sha256_file(file.string());
        }
        return out;
    }
    return "sha256:" + sha256_file(path);
}

namespace {

// ---------------------------------------------------------------------------
// Option storage shared by the subcommands.

struct Options {
    unsigned threads = 1;
    bool deterministic = false;
    std::string manifest;

    std::string in;
    std::string out = "-";
    std::string out_dir;
    bool weighted = false;
    bool weighted_out = false;
    std::string charset;
    std::string min_len;
    std::string max_len;

    // prep
    std::string exclude;
    bool exclude_weighted = false;
    bool dedup = false;
    // split
    std::string train;
    std::string test;
    std::string sidecar;
    double ratio = 0.8;
    std::string seed = "1";
    bool keep_duplicates = false;
    // vocab
    std::string size = "30000";
    // markov
    std::string order = "3";
    double alpha = 0.0;
    // gen
    std::string model;
    std::string mode = "enumerate";
    std::string limit = "0";
    std::string max_frontier = "0";
    bool with_prob = false;
    // rules
    std::string rules;
    // prince
    std::string chain_min_len = "4";
    std::string chain_max_len = "12";
    std::string max_elems = "8";
    bool keyspace_only = false;
    // match
    std::string checkpoints;
    std::string json;
    std::string matched_out;
    std::string partitions = "0";
    std::string tmp_dir;
    std::string max_unique = "0";
    // stats
    std::string reference;
    bool reference_weighted = false;
    std::string vocab;
    // intersect
    std::vector<std::string> sets;
    std::string summary;
    // replay
    std::string replay_manifest;
    bool no_verify = false;
};

/// Option names whose values are input paths and get digested into the manifest
/// (split's --test is an output).
const std::set<std::string> kInputOptions = {"in", "test", "reference", "vocab", "rules", "model", "exclude", "charset"};

unsigned worker_count(const Options& o) { return o.deterministic ? 1U : std::max(1U, o.threads); }

CharsetPolicy policy_from(const Options& o) {
    CharsetPolicy policy = o.charset.empty() ? CharsetPolicy() : CharsetPolicy::load(o.charset);
    std::size_t min_len = policy.min_len();
    std::size_t max_len = policy.max_len();
    if (!o.min_len.empty()) min_len = parse_count(o.min_len);
    if (!o.max_len.empty()) max_len = parse_count(o.max_len);
    policy.set_length_window(min_len, max_len);
    return policy;
}

void report_stats(const std::string& label, const CorpusStats& stats) {
    std::cerr << label << ": total_lines=" << stats.total_lines << " accepted=" << stats.accepted
              << " rejected_charset=" << stats.rejected_charset << " rejected_length=" << stats.rejected_length
              << " rejected_encoding=" << stats.rejected_encoding << '\n';
}

void write_stats_file(const std::string& path, const CorpusStats& stats) {
    OutputFile out(path);
    out.stream() << "total_lines=" << stats.total_lines << "\naccepted=" << stats.accepted << "\nrejected_charset="
                 << stats.rejected_charset << "\nrejected_length=" << stats.rejected_length
                 << "\nrejected_encoding=" << stats.rejected_encoding << '\n';
    out.close();
}

std::vector<PasswordRecord> load_records(const Options& o, const std::string& path, bool weighted) {
    auto loaded = load_wordlist(path, policy_from(o), weighted);
    report_stats(path, loaded.stats);
    return std::move(loaded.records);
}

// ---------------------------------------------------------------------------
// Subcommands

void run_prep(const Options& o) {
    const CharsetPolicy policy = policy_from(o);
    auto loaded = load_wordlist(o.in, policy, o.weighted);
    report_stats(o.in, loaded.stats);
    std::vector<PasswordRecord> records;
    if (!o.exclude.empty()) {
        // Exclusions are matched verbatim, so they are not length-filtered.
        CharsetPolicy exclude_policy = policy;
        exclude_policy.set_length_window(1, std::max<std::size_t>(policy.max_len(), 1 << 20));
        const auto excluded = load_wordlist(o.exclude, exclude_policy, o.exclude_weighted);
        records = prepare_cross_eval(loaded.records, excluded.records, policy);
    } else {
        records = o.dedup ? dedup_stream(loaded.records) : std::move(loaded.records);
    }
    OutputFile out(o.out);
    write_wordlist(out.stream(), records, o.weighted_out);
    out.close();
    if (o.out != "-") write_stats_file(o.out + ".stats", loaded.stats);
}

void run_split(const Options& o) {
    auto records = load_records(o, o.in, o.weighted);
    if (!o.keep_duplicates) records = dedup_stream(records);
    const auto seed = parse_count(o.seed);
    const CorpusSplit split = split_corpus(std::move(records), o.ratio, seed);
    {
        OutputFile train(o.train);
        write_wordlist(train.stream(), split.train, o.weighted_out);
        train.close();
        OutputFile test(o.test);
        write_wordlist(test.stream(), split.test, o.weighted_out);
        test.close();
    }
    OutputFile meta(o.sidecar.empty() ? o.train + ".meta" : o.sidecar);
    meta.stream() << "seed=" << split.seed << "\nratio=" << format_double(split.ratio) << "\ntrain_records=" << split.train.size()
                  << "\ntest_records=" << split.test.size() << "\ntrain_count=" << total_count(split.train)
                  << "\ntest_count=" << total_count(split.test) << '\n';
    meta.close();
}

void run_vocab(const Options& o) {
    const auto records = load_records(o, o.in, o.weighted);
    const auto vocab = build_vocab(records, parse_count(o.size), policy_from(o), worker_count(o));
    OutputFile out(o.out);
    vocab.save(out.stream());
    out.close();
}

void run_train_markov(const Options& o) {
    const auto records = load_records(o, o.in, o.weighted);
    const std::size_t gen_max_len = o.max_len.empty() ? policy_from(o).max_len() : parse_count(o.max_len);
    const auto model = train_ngram(records, static_cast<unsigned>(parse_count(o.order)), o.alpha, gen_max_len);
    OutputFile out(o.out);
    model.save(out.stream());
    out.close();
}

void run_train_pcfg(const Options& o) {
    const auto records = load_records(o, o.in, o.weighted);
    const auto model = train_structure(records);
    fs::create_directories(o.out_dir);
    model.save_dir(o.out_dir);
}

template <typename Sampler>
void write_samples(const Sampler& sampler, std::uint64_t limit, unsigned workers, std::ostream& out) {
    std::uint64_t written = 0;
    std::uint64_t block = 0;
    while (written < limit) {
        std::vector<std::future<std::vector<std::string>>> batch;
        for (unsigned w = 0; w < workers; ++w) {
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                       [&sampler, index = block++] { return sampler.block(index); }));
        }
        for (auto& f : batch) {
            for (const auto& s : f.get()) {
                if (written >= limit) break;
                out << s << '\n';
                ++written;
            }
        }
    }
}

void run_gen(const Options& o) {
    const auto limit = parse_count(o.limit);
    const auto max_frontier = static_cast<std::size_t>(parse_count(o.max_frontier));
    if (o.mode != "sample" && o.mode != "enumerate") throw DataError("--mode must be sample or enumerate");
    if (o.mode == "sample" && limit == 0) throw DataError("sampling needs a positive --limit");
    OutputFile out(o.out);
    auto& os = out.stream();
    const auto emit = [&](const ScoredCandidate& c) {
        os << c.text;
        if (o.with_prob) os << '\t' << format_double(c.probability);
        os << '\n';
    };
    if (fs::is_directory(o.model)) {
        const auto model = StructureModel::load_dir(o.model);
        if (o.mode == "enumerate") {
            StructureEnumerator it(model, limit, max_frontier);
            while (auto c = it.next()) emit(*c);
        } else {
            write_samples(StructureSampler(model, parse_count(o.seed)), limit, worker_count(o), os);
        }
    } else {
        InputFile in(o.model);
        const auto model = NgramModel::load(in.stream());
        if (o.mode == "enumerate") {
            NgramEnumerator it(model, limit, max_frontier);
            while (auto c = it.next()) emit(*c);
        } else {
            write_samples(NgramSampler(model, parse_count(o.seed)), limit, worker_count(o), os);
        }
    }
    out.close();
}

void run_rules(const Options& o) {
    const auto ruleset = RuleSet::load(o.rules);
    const auto words = load_records(o, o.in, o.weighted);
    std::size_t record = 0;
    std::uint64_t repeat = 0;
    CandidateSource source = [&](std::string& w) {
        while (record < words.size()) {
            if (repeat < words[record].count) {
                ++repeat;
                w = words[record].text;
                return true;
            }
            ++record;
            repeat = 0;
        }
        return false;
    };
    RuleExpander expander(ruleset, source, o.dedup, worker_count(o), static_cast<std::size_t>(parse_count(o.max_unique)));
    OutputFile out(o.out);
    std::string candidate;
    while (expander.next(candidate)) out.stream() << candidate << '\n';
    out.close();
    const auto& s = expander.stats();
    std::cerr << "rules: chains=" << ruleset.chains.size() << " words=" << s.words << " attempted=" << s.attempted
              << " rejected=" << s.rejected << " produced=" << s.produced << " emitted=" << s.emitted << '\n';
}

void run_prince(const Options& o) {
    const auto words = load_records(o, o.in, o.weighted);
    const auto index = build_length_index(words);
    const auto min_len = parse_count(o.chain_min_len);
    const auto max_len = parse_count(o.chain_max_len);
    const auto max_elems = parse_count(o.max_elems);
    OutputFile out(o.out);
    if (o.keyspace_only) {
        out.stream() << chain_keyspace(index, min_len, max_len, max_elems).str() << '\n';
    } else {
        const auto limit = parse_count(o.limit);
        ChainEnumerator chains(index, min_len, max_len, max_elems);
        std::string candidate;
        for (std::uint64_t n = 0; (limit == 0 || n < limit) && chains.next(candidate); ++n) out.stream() << candidate << '\n';
    }
    out.close();
}

void run_match(const Options& o) {
    MatchOptions options;
    if (!o.checkpoints.empty()) options.checkpoints = parse_count_list(o.checkpoints);
    options.max_unique = static_cast<std::size_t>(parse_count(o.max_unique));
    const auto partitions = static_cast<std::size_t>(parse_count(o.partitions));

    InputFile candidates_in(o.in);
    const CandidateSource candidates = lines_source(candidates_in.stream());
    std::vector<std::string> matched;
    auto* matched_ptr = o.matched_out.empty() ? nullptr : &matched;
    MatchLedger ledger;
    if (partitions > 0) {
        ledger = match_stream_partitioned(candidates, o.test, options, partitions,
                                          o.tmp_dir.empty() ? fs::temp_directory_path().string() : o.tmp_dir, matched_ptr);
    } else {
        InputFile test_in(o.test);
        const Matcher matcher = build_matcher(lines_source(test_in.stream()));
        std::cerr << "match: test set " << matcher.size() << " unique entries, ~" << (matcher.memory_bytes() >> 20) << " MiB\n";
        ledger = match_stream(candidates, matcher, options, matched_ptr);
    }
    OutputFile out(o.out);
    ledger.write_tsv(out.stream());
    out.close();
    if (!o.json.empty()) {
        OutputFile json(o.json);
        ledger.write_json(json.stream());
        json.close();
    }
    if (matched_ptr) {
        OutputFile m(o.matched_out);
        for (const auto& text : matched) m.stream() << text << '\n';
        m.close();
    }
}

void run_rules_match(const Options& o) {
    const auto ruleset = RuleSet::load(o.rules);
    InputFile test_in(o.test);
    const Matcher matcher = build_matcher(lines_source(test_in.stream()));
    InputFile candidates_in(o.in);
    const auto report = rule_augmented_match(lines_source(candidates_in.stream()), ruleset, matcher, worker_count(o),
                                             static_cast<std::size_t>(parse_count(o.max_unique)));
    OutputFile out(o.out);
    report.write_tsv(out.stream());
    out.close();
}

void run_stats(const Options& o) {
    InputFile vocab_in(o.vocab);
    const auto vocab = SegmentVocab::load(vocab_in.stream());
    const auto reference = load_records(o, o.reference, o.reference_weighted);
    InputFile candidates_in(o.in);
    const auto report = stats_report(lines_source(candidates_in.stream()), reference, vocab);
    fs::create_directories(o.out_dir);
    for (const auto* stat : {&report.pattern, &report.signature, &report.segments}) {
        OutputFile out((fs::path(o.out_dir) / (stat->name + ".tsv")).string());
        stat->write_tsv(out.stream());
        out.close();
    }
    OutputFile summary((fs::path(o.out_dir) / "summary.tsv").string());
    report.write_summary(summary.stream());
    summary.close();
}

void run_topfreq(const Options& o) {
    InputFile in(o.in);
    const auto top = top_frequency(lines_source(in.stream()));
    OutputFile out(o.out);
    out.stream() << "text\tcount\ttotal\trelative_frequency\n"
                 << top.text << '\t' << top.count << '\t' << top.total << '\t' << format_fraction(top.count, top.total, 9) << '\n';
    out.close();
}

void run_intersect(const Options& o) {
    std::vector<LabeledSet> sets;
    for (const auto& spec : o.sets) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw DataError("--set expects label=path, got '" + spec + "'");
        sets.push_back({spec.substr(0, eq), read_lines(spec.substr(eq + 1))});
    }
    const auto report = intersections(sets);
    OutputFile out(o.out);
    report.write_tsv(out.stream());
    out.close();
    if (!o.summary.empty()) {
        OutputFile summary(o.summary);
        report.write_summary(summary.stream());
        summary.close();
    }
}

// ---------------------------------------------------------------------------
// Wiring

struct Command {
    CLI::App* app;
    std::function<void(const Options&)> run;
    /// Option naming the primary output; its value decides the default manifest path.
    std::string primary_output;
    bool output_is_dir = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--threads", o.threads, "Worker threads");
    sub->add_flag("--deterministic", o.deterministic, "Force single-worker ordering");
    sub->add_option("--manifest", o.manifest, "Where to write the run manifest");
}

void add_policy(CLI::App* sub, Options& o) {
    sub->add_option("--charset", o.charset, "Charset policy file (allowed=, min_len=, max_len=)");
    sub->add_option("--min-len", o.min_len, "Override the policy's minimum length");
    sub->add_option("--max-len", o.max_len, "Override the policy's maximum length");
}

std::map<std::string, Command> build_commands(CLI::App& app, Options& o) {
    std::map<std::string, Command> commands;
    const auto add = [&](const std::string& name, const std::string& help, std::function<void(const Options&)> run,
                         std::string primary, bool is_dir = false) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, o);
        commands[name] = Command{sub, std::move(run), std::move(primary), is_dir};
        return sub;
    };

    auto* prep = add("prep", "Normalize a wordlist; with --exclude, build a cross-dataset test set", run_prep, "out");
    prep->add_option("--in", o.in, "Input wordlist")->required();
    prep->add_option("--out", o.out, "Output wordlist");
    prep->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    prep->add_flag("--weighted-out", o.weighted_out, "Write text<TAB>count");
    prep->add_option("--exclude", o.exclude, "Remove every entry of this wordlist (e.g. the training split)");
    prep->add_flag("--exclude-weighted", o.exclude_weighted, "Exclusion list is weighted");
    prep->add_flag("--dedup", o.dedup, "Collapse duplicates, summing counts");
    add_policy(prep, o);

    auto* split = add("split", "Deduplicate and split a corpus into train/test", run_split, "train");
    split->add_option("--in", o.in, "Input wordlist")->required();
    split->add_option("--train", o.train, "Train output")->required();
    split->add_option("--test", o.test, "Test output")->required();
    split->add_option("--sidecar", o.sidecar, "Split metadata (default <train>.meta)");
    split->add_option("--ratio", o.ratio, "Train fraction in (0,1)");
    split->add_option("--seed", o.seed, "Shuffle seed");
    split->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    split->add_flag("--weighted-out", o.weighted_out, "Write text<TAB>count");
    split->add_flag("--keep-duplicates", o.keep_duplicates, "Split records as-is instead of unique texts");
    add_policy(split, o);

    auto* vocab = add("vocab", "Build a segment vocabulary", run_vocab, "out");
    vocab->add_option("--in", o.in, "Training wordlist")->required();
    vocab->add_option("--out", o.out, "Vocab file");
    vocab->add_option("--size", o.size, "Number of mined segments");
    vocab->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    add_policy(vocab, o);

    auto* markov = add("train-markov", "Train a character n-gram model", run_train_markov, "out");
    markov->add_option("--in", o.in, "Training wordlist")->required();
    markov->add_option("--out", o.out, "Model file");
    markov->add_option("--order", o.order, "n-gram order k");
    markov->add_option("--alpha", o.alpha, "Additive smoothing");
    markov->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    add_policy(markov, o);

    auto* pcfg = add("train-pcfg", "Train a structure (PCFG-style) model", run_train_pcfg, "out-dir", true);
    pcfg->add_option("--in", o.in, "Training wordlist")->required();
    pcfg->add_option("--out-dir", o.out_dir, "Model directory")->required();
    pcfg->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    add_policy(pcfg, o);

    auto* gen = add("gen", "Generate candidates from a trained model", run_gen, "out");
    gen->add_option("--model", o.model, "n-gram model file or structure model directory")->required();
    gen->add_option("--mode", o.mode, "sample or enumerate");
    gen->add_option("--limit", o.limit, "Number of candidates (0 = all, enumerate only)");
    gen->add_option("--seed", o.seed, "Sampling seed");
    gen->add_option("--out", o.out, "Candidate output");
    gen->add_option("--max-frontier", o.max_frontier, "Frontier cap for enumeration (0 = none)");
    gen->add_flag("--with-prob", o.with_prob, "Append <TAB>probability when enumerating");

    auto* rules = add("rules", "Apply a rule file to a wordlist", run_rules, "out");
    rules->add_option("--rules", o.rules, "Rule file")->required();
    rules->add_option("--in", o.in, "Word list")->required();
    rules->add_option("--out", o.out, "Candidate output");
    rules->add_flag("--dedup", o.dedup, "Emit each candidate once");
    rules->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    rules->add_option("--max-unique", o.max_unique, "Dedup cap (0 = none)");
    add_policy(rules, o);

    auto* prince = add("prince", "Concatenate wordlist elements into chains", run_prince, "out");
    prince->add_option("--in", o.in, "Element wordlist")->required();
    prince->add_option("--out", o.out, "Candidate output");
    prince->add_option("--min-len", o.chain_min_len, "Minimum candidate length");
    prince->add_option("--max-len", o.chain_max_len, "Maximum candidate length");
    prince->add_option("--max-elems", o.max_elems, "Maximum elements per chain");
    prince->add_option("--limit", o.limit, "Stop after this many candidates (0 = all)");
    prince->add_flag("--keyspace", o.keyspace_only, "Print the exact keyspace and exit");
    prince->add_flag("--weighted", o.weighted, "Input lines are text<TAB>count");
    prince->add_option("--charset", o.charset, "Charset policy for the element list");

    auto* match = add("match", "Checkpointed matching against a test set", run_match, "out");
    match->add_option("--test", o.test, "Test wordlist")->required();
    match->add_option("--in", o.in, "Candidates (- for stdin)");
    match->add_option("--checkpoints", o.checkpoints, "Comma-separated counts, e.g. 1e3,1e4");
    match->add_option("--out", o.out, "Ledger TSV");
    match->add_option("--json", o.json, "Ledger JSON");
    match->add_option("--matched-out", o.matched_out, "Write matched test entries");
    match->add_option("--partitions", o.partitions, "Two-pass disk-partitioned mode with N partitions (0 = in memory)");
    match->add_option("--tmp-dir", o.tmp_dir, "Directory for partition files");
    match->add_option("--max-unique", o.max_unique, "Dedup cap (0 = none)");

    auto* rules_match = add("rules-match", "Matches before and after applying a rule file", run_rules_match, "out");
    rules_match->add_option("--test", o.test, "Test wordlist")->required();
    rules_match->add_option("--in", o.in, "Candidates (- for stdin)");
    rules_match->add_option("--rules", o.rules, "Rule file")->required();
    rules_match->add_option("--out", o.out, "Report TSV");
    rules_match->add_option("--max-unique", o.max_unique, "Dedup cap (0 = none)");

    auto* stats = add("stats", "Pattern, signature and segment-count histograms", run_stats, "out-dir", true);
    stats->add_option("--in", o.in, "Candidates (- for stdin)");
    stats->add_option("--reference", o.reference, "Reference wordlist")->required();
    stats->add_flag("--reference-weighted", o.reference_weighted, "Reference lines are text<TAB>count");
    stats->add_option("--vocab", o.vocab, "Segment vocab file")->required();
    stats->add_option("--out-dir", o.out_dir, "Output directory")->required();
    add_policy(stats, o);

    auto* topfreq = add("topfreq", "Most common candidate and its relative frequency", run_topfreq, "out");
    topfreq->add_option("--in", o.in, "Candidates (- for stdin)");
    topfreq->add_option("--out", o.out, "Output TSV");

    auto* intersect = add("intersect", "Venn region counts of 2..6 match sets", run_intersect, "out");
    intersect->add_option("--set", o.sets, "label=path (repeat 2..6 times)")->required();
    intersect->add_option("--out", o.out, "Region TSV");
    intersect->add_option("--summary", o.summary, "Human-readable summary");

    return commands;
}

RunConfig capture(const std::string& name, const CLI::App& sub) {
    RunConfig config;
    config.command = name;
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string& key = opt->get_single_name();
        if (key == "help") continue;
        const bool is_flag = opt->get_type_size_max() == 0;
        if (opt->count() > 0) {
            if (is_flag) {
                config.options.emplace_back(key, "true");
            } else {
                for (const auto& value : opt->results()) config.options.emplace_back(key, value);
            }
        } else if (!is_flag && !opt->get_default_str().empty()) {
            config.options.emplace_back(key, opt->get_default_str());
        }
    }
    for (const auto& [key, value] : config.options) {
        if (kInputOptions.contains(key) && !(name == "split" && key == "test")) {
            config.inputs.emplace_back(key, input_digest(value));
        } else if (key == "set") {
            const auto eq = value.find('=');
            if (eq != std::string::npos) config.inputs.emplace_back(key, input_digest(value.substr(eq + 1)));
        }
    }
    return config;
}

std::string manifest_path(const Options& o, const Command& command, const std::string& name, const RunConfig& config) {
    if (!o.manifest.empty()) return o.manifest;
    const std::string target = config.value(command.primary_output);
    if (target.empty() || target == "-") return name + ".manifest";
    if (command.output_is_dir) return (fs::path(target) / "run.manifest").string();
    return target + ".manifest";
}

int execute(const std::vector<std::string>& args, bool verify_inputs_against, const RunConfig* expected);

int replay(const std::string& path, bool verify) {
    const RunConfig config = RunConfig::load(path);
    if (config.version != kVersion) {
        std::cerr << "warning: manifest written by version " << config.version << ", running " << kVersion << '\n';
    }
    std::vector<std::string> args{"pwbench"};
    for (auto& arg : config.to_args()) args.push_back(std::move(arg));
    return execute(args, verify, &config);
}

int execute(const std::vector<std::string>& args, bool verify, const RunConfig* expected) {
    Options o;
    CLI::App app{"Password-guessing workbench: generators, tokenization and evaluation over wordlists", "pwbench"};
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version",
                         "pwbench " + std::string(kVersion) + "\nformats: " + std::string(kManifestFormat) +
                             " ngram/1 structure/1 vocab/1 ledger/1 rules/1");
    app.set_config("--config")->envname("PWBENCH_CONFIG");
    app.require_subcommand(1);
    auto commands = build_commands(app, o);

    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay_cmd->add_option("manifest", o.replay_manifest, "Manifest file")->required();
    replay_cmd->add_flag("--no-verify", o.no_verify, "Skip input digest verification");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (replay_cmd->parsed()) return replay(o.replay_manifest, !o.no_verify);

        for (auto& [name, command] : commands) {
            if (!command.app->parsed()) continue;
            RunConfig config = capture(name, *command.app);
            if (expected && verify) {
                for (const auto& [key, digest] : expected->inputs) {
                    const auto it = std::find(config.inputs.begin(), config.inputs.end(), std::make_pair(key, digest));
                    if (it == config.inputs.end()) throw DataError("input '" + key + "' differs from the manifest digest");
                }
            }
            command.run(o);
            OutputFile manifest(manifest_path(o, command, name, config));
            manifest.stream() << config.serialize();
            manifest.close();
            return kOk;
        }
        return kUsage;
    } catch (const ResourceLimitError& e) {
        std::cerr << "pwbench: resource limit: " << e.what() << '\n';
        return kResourceLimit;
    } catch (const std::exception& e) {
        std::cerr << "pwbench: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    if (args.empty()) return kUsage;
    return execute(args, false, nullptr);
}

int cli_dispatch(int argc, const char* const* argv) {
    return cli_dispatch(std::vector<std::string>(argv, argv + argc));
}

}  // namespace pwbench::cli
