#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace emo::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based physical line where the record starts
};

// Comma-separated, double-quote quoting ("" escapes a quote), quoted fields may
// span lines, LF or CRLF record terminators. A leading UTF-8 BOM is skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns std::nullopt at end of input. Throws ParseError on an unterminated quote.
  std::optional<Record> next();

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  bool started_ = false;
};

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace emo::csv
