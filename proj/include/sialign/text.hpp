#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sialign {

// NFKC, then whitespace runs collapsed to one ASCII space and the ends
// stripped. Total: invalid UTF-8 decodes to U+FFFD.
std::string normalize_text(std::string_view raw);

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);

bool is_space(char32_t c);

// Code points with all whitespace removed.
std::u32string without_whitespace(std::string_view utf8);

// Character length used for length ratios: code points, whitespace excluded.
std::size_t char_length(std::string_view utf8);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace sialign
