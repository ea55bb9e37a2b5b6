#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xlc::text {

/// Metric/embedding tokenizer: ASCII-lowercases, splits on whitespace and
/// punctuation (ASCII and common Unicode), drops the separators.
std::vector<std::string> tokenize(std::string_view input);

/// True for ASCII whitespace and the Unicode spaces handled by the tokenizer.
bool is_space_codepoint(char32_t cp) noexcept;

/// Collapses every whitespace run into one ASCII space and trims both ends.
std::string collapse_whitespace(std::string_view input);

std::string_view trim(std::string_view s) noexcept;
std::string to_lower_ascii(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept;

std::vector<std::string_view> split_lines(std::string_view s);

/// Splits prose into sentences on '.', '!' or '?' followed by whitespace or
/// end of input. Terminators stay attached to their sentence.
std::vector<std::string> split_sentences(std::string_view s);

/// Case-insensitive label key: lower-cases and maps runs of whitespace, hyphens
/// and underscores to a single space ("Ram-memory" -> "ram memory").
std::string label_key(std::string_view label);

/// Decodes one UTF-8 code point at `pos`, advancing it. Invalid bytes
/// decode as U+FFFD and advance by one.
char32_t next_codepoint(std::string_view s, std::size_t& pos) noexcept;

}  // namespace xlc::text
