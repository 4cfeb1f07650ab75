#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace sfl::io {

using json = nlohmann::ordered_json;

// round-trip-exact decimal rendering used for every floating-point cell
std::string format_double(double v);

// CSV accumulator with a fixed-width header row. '.' decimal, '\n' line
// endings, UTF-8; fields containing separators are quoted.
class Csv {
  public:
    explicit Csv(std::vector<std::string> header);

    Csv& cell(double v);
    Csv& cell(int v);
    Csv& cell(long long v);
    Csv& cell(std::uint64_t v);
    Csv& cell(bool v);  // rendered 1 / 0
    Csv& cell(const std::string& v);
    Csv& cell(const char* v);
    void end_row();  // errors unless exactly header-width cells were added

    const std::string& str() const;
    void write(const std::string& path) const;

  private:
    Csv& raw(std::string field);

    std::size_t width_ = 0;
    std::size_t in_row_ = 0;
    std::string buf_;
};

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sfl::io
