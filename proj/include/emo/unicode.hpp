#pragma once

#include <string>
#include <string_view>
#include <vector>

// Thin helpers over ICU; everything takes and returns UTF-8.
namespace emo::unicode {

// Throws ParseError on ill-formed UTF-8.
void validate_utf8(std::string_view text);

// Full Unicode default case folding.
std::string fold_case(std::string_view text);

// Segments at Unicode (UAX #29) word boundaries. Segments made only of
// whitespace and punctuation are dropped; letters, numbers and symbols
// (emoji included) survive.
std::vector<std::string> word_segments(std::string_view text);

// Splits on runs of Unicode White_Space.
std::vector<std::string> whitespace_split(std::string_view text);

// Byte offsets of every code point boundary in `text`, including 0 and size().
std::vector<std::size_t> code_point_offsets(std::string_view text);

}  // namespace emo::unicode
