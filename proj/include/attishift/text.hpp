#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace attishift::text {

// Decodes one UTF-8 code point starting at `pos`, advancing `pos`. Malformed
// bytes decode as themselves (one byte each), so decoding never fails.
char32_t decode_utf8(std::string_view s, std::size_t& pos);
std::string encode_utf8(char32_t cp);

// Splits into code points, each kept as its UTF-8 byte string.
std::vector<std::string> utf8_chars(std::string_view s);
std::size_t utf8_length(std::string_view s);
// Converts a code point offset to a byte offset; offsets past the end clamp.
std::size_t byte_offset(std::string_view s, std::size_t char_offset);
std::size_t char_offset(std::string_view s, std::size_t byte_offset);

bool is_cjk(char32_t cp);
bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_word_char(char ch);

std::string_view trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower_ascii(std::string_view s);
std::string capitalize_first(std::string_view s);
bool equals_ignore_case(std::string_view a, std::string_view b);

// Whitespace split that also detaches leading/trailing punctuation from each
// token. Word-internal apostrophes and hyphens stay attached.
std::vector<std::string> tokenize_words(std::string_view s, bool keep_punct = true);

// Replaces every occurrence of `from` with `to`.
std::string replace_all(std::string_view s, std::string_view from, std::string_view to);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Byte offsets of `word` occurrences bounded by non-word characters.
std::vector<std::size_t> find_whole_word(std::string_view haystack, std::string_view word);

// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string format_double(double v);
// Fixed notation with `digits` decimals.
std::string format_fixed(double v, int digits);

}  // namespace attishift::text
