#include "merit/language.hpp"

#include "merit/error.hpp"

namespace merit {

std::string_view to_code(LanguageTag lang) noexcept {
  switch (lang) {
    case LanguageTag::fil: return "fil";
    case LanguageTag::id: return "id";
    case LanguageTag::lo: return "lo";
    case LanguageTag::my: return "my";
    case LanguageTag::vi: return "vi";
    case LanguageTag::zh: return "zh";
  }
  return "";
}

std::string_view english_name(LanguageTag lang) noexcept {
  switch (lang) {
    case LanguageTag::fil: return "Filipino";
    case LanguageTag::id: return "Indonesian";
    case LanguageTag::lo: return "Lao";
    case LanguageTag::my: return "Burmese";
    case LanguageTag::vi: return "Vietnamese";
    case LanguageTag::zh: return "Chinese";
  }
  return "";
}

LanguageTag parse_language(std::string_view code) {
  for (auto lang : {LanguageTag::fil, LanguageTag::id, LanguageTag::lo,
                    LanguageTag::my, LanguageTag::vi, LanguageTag::zh}) {
    if (to_code(lang) == code) return lang;
  }
  throw Error(ErrorCode::InvalidLanguage,
              "unknown language code '" + std::string(code) + "'");
}

}  // namespace merit
