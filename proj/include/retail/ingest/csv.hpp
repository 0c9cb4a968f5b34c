#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace retail::ingest {

/// Streaming RFC 4180 reader: comma delimiter, double-quote quoting with "" escapes, quoted
/// fields may span lines, LF or CRLF record ends. A UTF-8 byte-order mark is skipped.
class CsvReader {
public:
    /// Throws NotFound if the file cannot be opened.
    explicit CsvReader(const std::string& path);

    /// Reads the next record into `fields`. Returns false at end of file. Throws ParseError on an
    /// unterminated quote or stray characters after a closing quote.
    bool next(std::vector<std::string>& fields);

    /// Line on which the most recently returned record started (1-based).
    std::size_t line() const noexcept { return record_line_; }
    const std::string& path() const noexcept { return path_; }

private:
    int peek();
    int get();

    std::string path_;
    std::ifstream in_;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    std::size_t current_line_ = 1;
    std::size_t record_line_ = 0;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Strict numeric parsing for table cells; ParseError with file and line on failure.
double parse_double(std::string_view text, const std::string& file, std::size_t line, std::string_view column);
int parse_int(std::string_view text, const std::string& file, std::size_t line, std::string_view column);

}  // namespace retail::ingest
