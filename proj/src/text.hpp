#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bugtriage::detail {

inline constexpr char32_t kInvalidCodePoint = 0xFFFFFFFF;

/// Decodes one UTF-8 sequence starting at `pos`, advancing `pos`. Malformed
/// input consumes one byte and yields kInvalidCodePoint.
char32_t decode_utf8(std::string_view text, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

enum class CharClass { Letter, Digit, Space, Punctuation };
CharClass classify(char32_t cp);

char32_t to_lower(char32_t cp);

}  // namespace bugtriage::detail
