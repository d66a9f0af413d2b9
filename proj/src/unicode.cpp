#include "emo/unicode.hpp"

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <memory>

#include "emo/error.hpp"

namespace emo::unicode {
namespace {

icu::UnicodeString to_icu(std::string_view text) {
  validate_utf8(text);
  return icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool is_punct_or_space(UChar32 c) {
  if (u_isUWhiteSpace(c)) return true;
  const auto mask = U_GET_GC_MASK(c);
  return (mask & U_GC_P_MASK) != 0 || (mask & U_GC_CC_MASK) != 0 || (mask & U_GC_CF_MASK) != 0;
}

}  // namespace

void validate_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto n = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < n) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (c < 0) throw ParseError("invalid UTF-8 at byte offset " + std::to_string(at));
  }
}

std::string fold_case(std::string_view text) {
  auto s = to_icu(text);
  s.foldCase(U_FOLD_CASE_DEFAULT);
  return to_utf8(s);
}

std::vector<std::string> word_segments(std::string_view text) {
  const auto s = to_icu(text);
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) throw Error(std::string("ICU word break iterator: ") + u_errorName(status));
  it->setText(s);

  std::vector<std::string> out;
  int32_t start = it->first();
  for (int32_t end = it->next(); end != icu::BreakIterator::DONE; start = end, end = it->next()) {
    bool keep = false;
    for (int32_t i = start; i < end && !keep;) {
      const UChar32 c = s.char32At(i);
      keep = !is_punct_or_space(c);
      i += U16_LENGTH(c);
    }
    if (keep) out.push_back(to_utf8(s.tempSubStringBetween(start, end)));
  }
  return out;
}

std::vector<std::string> whitespace_split(std::string_view text) {
  validate_utf8(text);
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto n = static_cast<int32_t>(text.size());
  std::vector<std::string> out;
  int32_t i = 0;
  int32_t token_start = -1;
  while (i < n) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (u_isUWhiteSpace(c)) {
      if (token_start >= 0) out.emplace_back(text.substr(token_start, at - token_start));
      token_start = -1;
    } else if (token_start < 0) {
      token_start = at;
    }
  }
  if (token_start >= 0) out.emplace_back(text.substr(token_start));
  return out;
}

std::vector<std::size_t> code_point_offsets(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto n = static_cast<int32_t>(text.size());
  std::vector<std::size_t> out{0};
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (c < 0) throw ParseError("invalid UTF-8 in token");
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace emo::unicode
