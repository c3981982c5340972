#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace neurolex::text {

struct Utf8Repair {
  std::string text;
  std::size_t invalid_sequences = 0;
};

// Replaces every ill-formed UTF-8 sequence with U+FFFD and counts them.
Utf8Repair repair_utf8(std::string_view bytes);

// NFC composition. Input must be valid UTF-8.
std::string to_nfc(std::string_view utf8);

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Word characters for term boundaries: ASCII alphanumerics and any
// non-ASCII byte. Hyphens and apostrophes are separators.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline char ascii_upper(char c) {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

// Byte-length-preserving ASCII case folding.
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

std::string_view trim(std::string_view s);

// Collapses any whitespace run to one space and trims both ends.
std::string collapse_spaces(std::string_view s);

// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace neurolex::text
