#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace merit::unicode {

/// Decodes UTF-8 into scalar values. Ill-formed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

/// Number of Unicode scalar values (not bytes).
std::size_t char_count(std::string_view utf8);

/// General category P* or the CJK Symbols and Punctuation block.
bool is_punct(char32_t cp) noexcept;

/// General category Nd.
bool is_digit(char32_t cp) noexcept;

bool is_space(char32_t cp) noexcept;

/// Han, Hiragana, Katakana and Hangul scripts, plus the CJK symbol,
/// compatibility and fullwidth-form blocks.
bool is_cjk(char32_t cp) noexcept;

/// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

/// Whitespace split, then every CJK scalar becomes its own token.
std::vector<std::string> tokenize(std::string_view utf8);

}  // namespace merit::unicode
