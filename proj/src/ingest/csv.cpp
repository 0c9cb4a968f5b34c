#include "retail/ingest/csv.hpp"

#include <charconv>
#include <cmath>

#include "retail/core/error.hpp"

namespace retail::ingest {

namespace {

constexpr std::size_t kBufferSize = 1 << 20;

}  // namespace

CsvReader::CsvReader(const std::string& path) : path_(path), in_(path, std::ios::binary), buffer_(kBufferSize) {
    if (!in_) {
        throw NotFound("cannot open " + path);
    }
    // UTF-8 byte-order mark
    if (peek() == 0xEF) {
        get();
        if (get() != 0xBB || get() != 0xBF) {
            throw ParseError(path_, 1, "invalid byte-order mark");
        }
    }
}

int CsvReader::peek() {
    if (pos_ == end_) {
        in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        end_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        if (end_ == 0) {
            return -1;
        }
    }
    return static_cast<unsigned char>(buffer_[pos_]);
}

int CsvReader::get() {
    const int c = peek();
    if (c >= 0) {
        ++pos_;
        if (c == '\n') {
            ++current_line_;
        }
    }
    return c;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::size_t count = 0;
    auto field = [&]() -> std::string& {
        if (count == fields.size()) {
            fields.emplace_back();
        }
        std::string& f = fields[count++];
        f.clear();
        return f;
    };

    if (peek() < 0) {
        return false;
    }
    record_line_ = current_line_;
    std::string* current = &field();
    for (;;) {
        int c = get();
        if (c == '"' && current->empty()) {
            // Quoted field: runs to the matching quote; "" is a literal quote.
            for (;;) {
                c = get();
                if (c < 0) {
                    throw ParseError(path_, record_line_, "unterminated quoted field");
                }
                if (c == '"') {
                    if (peek() == '"') {
                        get();
                        current->push_back('"');
                        continue;
                    }
                    break;
                }
                current->push_back(static_cast<char>(c));
            }
            c = get();
            if (c != ',' && c != '\n' && c != '\r' && c >= 0) {
                throw ParseError(path_, current_line_, "unexpected character after closing quote");
            }
        }
        if (c == ',') {
            current = &field();
            continue;
        }
        if (c == '\r') {
            if (peek() == '\n') {
                get();
            }
            break;
        }
        if (c == '\n' || c < 0) {
            break;
        }
        current->push_back(static_cast<char>(c));
    }
    fields.resize(count);
    return true;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

double parse_double(std::string_view text, const std::string& file, std::size_t line, std::string_view column) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(v)) {
        throw ParseError(file, line, "column " + std::string(column) + ": not a number: '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view text, const std::string& file, std::size_t line, std::string_view column) {
    int v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw ParseError(file, line, "column " + std::string(column) + ": not an integer: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace retail::ingest
