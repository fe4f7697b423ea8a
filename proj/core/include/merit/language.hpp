#pragma once

#include <array>
#include <string>
#include <string_view>

namespace merit {

/// The five low-resource source languages plus the Chinese pivot.
enum class LanguageTag { fil, id, lo, my, vi, zh };

inline constexpr std::array<LanguageTag, 5> kSourceLanguages = {
    LanguageTag::fil, LanguageTag::id, LanguageTag::lo, LanguageTag::my,
    LanguageTag::vi};

std::string_view to_code(LanguageTag lang) noexcept;

/// English display name, e.g. "Lao".
std::string_view english_name(LanguageTag lang) noexcept;

/// Parses an ISO code ("vi"). Throws Error{InvalidLanguage} otherwise.
LanguageTag parse_language(std::string_view code);

inline bool is_source_language(LanguageTag lang) noexcept {
  return lang != LanguageTag::zh;
}

}  // namespace merit
