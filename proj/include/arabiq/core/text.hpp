#pragma once

#include <string>
#include <string_view>

namespace arabiq::text {

// UTF-8 <-> UTF-32. Decoding is lenient: malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

std::string nfc(std::string_view s);
std::string nfd(std::string_view s);

/// Removes U+200E, U+200F, U+202A..U+202E and U+2066..U+2069.
std::string strip_bidi_controls(std::string_view s);

constexpr bool is_bidi_control(char32_t cp) noexcept {
  return cp == 0x200E || cp == 0x200F || (cp >= 0x202A && cp <= 0x202E) ||
         (cp >= 0x2066 && cp <= 0x2069);
}

// Harakat, tanwin, shadda, sukun, the extended marks up to U+065F, and the
// superscript alef.
constexpr bool is_arabic_mark(char32_t cp) noexcept {
  return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670;
}

constexpr bool is_arabic_base_letter(char32_t cp) noexcept {
  return (cp >= 0x0621 && cp <= 0x064A) || (cp >= 0x0671 && cp <= 0x06D3);
}

// Base letters plus the presentation-form blocks, for "contains Arabic" tests.
constexpr bool is_arabic_letter(char32_t cp) noexcept {
  return is_arabic_base_letter(cp) || (cp >= 0xFB50 && cp <= 0xFDFF) ||
         (cp >= 0xFE70 && cp <= 0xFEFC);
}

constexpr bool is_latin_letter(char32_t cp) noexcept {
  return (cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z');
}

bool is_space(char32_t cp) noexcept;

std::string trim(std::string_view s);

/// Trims and folds every whitespace run (including newlines) to one ASCII space.
std::string collapse_whitespace(std::string_view s);

/// NFC, bidi-stripped, whitespace-collapsed form used for equality checks.
std::string canonical(std::string_view s);

/// canonical() with Arabic marks and tatweel removed.
std::string skeleton(std::string_view s);

}  // namespace arabiq::text
