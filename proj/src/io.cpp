#include "sfl/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace sfl::io {

std::string format_double(double v) {
    // shortest decimal form that parses back to exactly the same bits
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
    if (header.empty()) throw std::invalid_argument("csv: header must be nonempty");
    for (auto& h : header) raw(std::move(h));
    end_row();
}

Csv& Csv::raw(std::string field) {
    if (in_row_ == 0 && width_ > 0 && !buf_.empty() && buf_.back() != '\n') buf_ += '\n';
    if (in_row_ > 0) buf_ += ',';
    const bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (needs_quotes) {
        buf_ += '"';
        for (char c : field) {
            if (c == '"') buf_ += '"';
            buf_ += c;
        }
        buf_ += '"';
    } else {
        buf_ += field;
    }
    ++in_row_;
    return *this;
}

Csv& Csv::cell(double v) { return raw(format_double(v)); }
Csv& Csv::cell(int v) { return raw(std::to_string(v)); }
Csv& Csv::cell(long long v) { return raw(std::to_string(v)); }
Csv& Csv::cell(std::uint64_t v) { return raw(std::to_string(v)); }
Csv& Csv::cell(bool v) { return raw(v ? "1" : "0"); }
Csv& Csv::cell(const std::string& v) { return raw(v); }
Csv& Csv::cell(const char* v) { return raw(std::string(v)); }

void Csv::end_row() {
    if (in_row_ != width_)
        throw std::logic_error("csv: row has " + std::to_string(in_row_) + " cells, header has " +
                               std::to_string(width_));
    buf_ += '\n';
    in_row_ = 0;
}

const std::string& Csv::str() const {
    if (in_row_ != 0) throw std::logic_error("csv: unfinished row");
    return buf_;
}

void Csv::write(const std::string& path) const { write_text_file(path, str()); }

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("invalid JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sfl::io
