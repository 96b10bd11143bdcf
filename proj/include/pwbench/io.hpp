#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pwbench {

/// Pull-based candidate stream: fills `out` and returns true, or returns false at the end.
using CandidateSource = std::function<bool(std::string& out)>;

/// Reads a file, or standard input when path is "-".
class InputFile {
public:
    explicit InputFile(const std::string& path);

    std::istream& stream() { return *in_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::unique_ptr<std::ifstream> file_;
    std::istream* in_;
};

/// Writes a file, or standard output when path is "-".
class OutputFile {
public:
    explicit OutputFile(const std::string& path);
    ~OutputFile();

    OutputFile(const OutputFile&) = delete;
    OutputFile& operator=(const OutputFile&) = delete;

    std::ostream& stream() { return *out_; }
    /// Flushes and reports write failures (the destructor cannot).
    void close();

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
};

/// Reads one LF-terminated line, stripping a trailing CR. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

/// Candidate source over an input stream; one candidate per line, CR stripped, empty lines skipped.
CandidateSource lines_source(std::istream& in);

/// Candidate source over an in-memory list.
CandidateSource vector_source(const std::vector<std::string>& items);

/// Reads every non-empty line of a file ("-" for stdin).
std::vector<std::string> read_lines(const std::string& path);

/// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split_fields(std::string_view line, char delim);

/// Parses a non-negative decimal integer, optionally in scientific shorthand ("1e6", "2.5e3").
/// Throws DataError when the text is not an exact non-negative integer.
std::uint64_t parse_count(std::string_view text);

/// Comma-separated list of parse_count values.
std::vector<std::uint64_t> parse_count_list(std::string_view text);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

/// Exact num/den rendered with `digits` fractional digits, rounded half up. den must be > 0.
std::string format_fraction(std::uint64_t num, std::uint64_t den, int digits = 6);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

}  // namespace pwbench
