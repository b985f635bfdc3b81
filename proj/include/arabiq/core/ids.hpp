#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace arabiq {

using Ulid = std::string;

/// Returns a 26-character Crockford base32 ULID. Values produced by one
/// process are strictly increasing, even within the same millisecond.
Ulid new_ulid();

/// Same encoding with caller-supplied parts; exposed for tests.
Ulid encode_ulid(std::uint64_t millis, std::uint16_t rand_hi, std::uint64_t rand_lo);

bool is_ulid(std::string_view s) noexcept;

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view bytes);

bool is_sha256_hex(std::string_view s) noexcept;

std::string base64_encode(std::string_view bytes);

}  // namespace arabiq
