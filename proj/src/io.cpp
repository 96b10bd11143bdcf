#include "pwbench/io.hpp"

#include "pwbench/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>

namespace pwbench {

InputFile::InputFile(const std::string& path) : path_(path), in_(&std::cin) {
    if (path != "-") {
        file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*file_) throw DataError("cannot open input file: " + path);
        in_ = file_.get();
    }
}

OutputFile::OutputFile(const std::string& path) : path_(path), out_(&std::cout) {
    if (path != "-") {
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_) throw DataError("cannot open output file: " + path);
        out_ = file_.get();
    }
}

OutputFile::~OutputFile() {
    if (out_) out_->flush();
}

void OutputFile::close() {
    out_->flush();
    if (!*out_) throw DataError("write failed: " + path_);
    if (file_) {
        file_->close();
        if (!*file_) throw DataError("write failed: " + path_);
    }
}

bool read_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

CandidateSource lines_source(std::istream& in) {
    return [&in](std::string& out) {
        while (read_line(in, out)) {
            if (!out.empty()) return true;
        }
        return false;
    };
}

CandidateSource vector_source(const std::vector<std::string>& items) {
    return [&items, i = std::size_t{0}](std::string& out) mutable {
        if (i >= items.size()) return false;
        out = items[i++];
        return true;
    };
}

std::vector<std::string> read_lines(const std::string& path) {
    InputFile in(path);
    std::vector<std::string> lines;
    std::string line;
    while (read_line(in.stream(), line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

}  // namespace

std::uint64_t parse_count(std::string_view text) {
    const auto fail = [&] { return DataError("not a non-negative integer count: '" + std::string(text) + "'"); };
    std::string_view mantissa = text;
    std::uint64_t exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        const auto exp_text = text.substr(e + 1);
        mantissa = text.substr(0, e);
        if (!all_digits(exp_text) || exp_text.size() > 2) throw fail();
        exponent = std::stoull(std::string(exp_text));
    }
    std::string_view int_part = mantissa;
    std::string_view frac_part;
    if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        int_part = mantissa.substr(0, dot);
        frac_part = mantissa.substr(dot + 1);
        if (!all_digits(frac_part)) throw fail();
    }
    if (!all_digits(int_part)) throw fail();
    // Trailing fractional zeros do not need exponent budget.
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.remove_suffix(1);
    if (frac_part.size() > exponent) throw fail();

    std::string digits(int_part);
    digits += frac_part;
    digits.append(exponent - frac_part.size(), '0');
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) throw fail();
    return value;
}

std::vector<std::uint64_t> parse_count_list(std::string_view text) {
    std::vector<std::uint64_t> values;
    for (auto field : split_fields(text, ',')) values.push_back(parse_count(field));
    return values;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_fraction(std::uint64_t num, std::uint64_t den, int digits) {
    unsigned __int128 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const unsigned __int128 scaled = (static_cast<unsigned __int128>(num) * scale * 2 + den) / (2 * static_cast<unsigned __int128>(den));
    const auto whole = static_cast<std::uint64_t>(scaled / scale);
    auto frac = static_cast<std::uint64_t>(scaled % scale);
    std::string out = std::to_string(whole);
    if (digits > 0) {
        std::string f = std::to_string(frac);
        out += '.';
        out.append(static_cast<std::size_t>(digits) - f.size(), '0');
        out += f;
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for digest: " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

}  // namespace pwbench
