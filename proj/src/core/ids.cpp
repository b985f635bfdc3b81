#include "arabiq/core/ids.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <mutex>
#include <random>
#include <stdexcept>

namespace arabiq {

namespace {

constexpr char kCrockford[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

class UlidGenerator {
public:
  UlidGenerator() : rng_(std::random_device{}()) {}

  Ulid next() {
    const auto ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    std::lock_guard lock(mutex_);
    if (ms > last_ms_) {
      last_ms_ = ms;
      hi_ = static_cast<std::uint16_t>(rng_());
      lo_ = rng_();
      // Leave headroom so same-millisecond increments cannot overflow.
      hi_ &= 0x7FFF;
    } else {
      // Same (or regressed) clock: bump the 80-bit random part.
      if (++lo_ == 0) {
        ++hi_;
      }
    }
    return encode_ulid(last_ms_, hi_, lo_);
  }

private:
  std::mutex mutex_;
  std::mt19937_64 rng_;
  std::uint64_t last_ms_ = 0;
  std::uint16_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

}  // namespace

Ulid encode_ulid(std::uint64_t millis, std::uint16_t rand_hi, std::uint64_t rand_lo) {
  // 128-bit value: 48-bit time | 16-bit hi | 64-bit lo, emitted as 26 base32
  // digits (the first digit only carries the top 3 bits).
  unsigned __int128 value = static_cast<unsigned __int128>(millis & 0xFFFFFFFFFFFFULL) << 80;
  value |= static_cast<unsigned __int128>(rand_hi) << 64;
  value |= rand_lo;
  std::string out(26, '0');
  for (int i = 25; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kCrockford[static_cast<unsigned>(value & 0x1F)];
    value >>= 5;
  }
  return out;
}

Ulid new_ulid() {
  static UlidGenerator generator;
  return generator.next();
}

bool is_ulid(std::string_view s) noexcept {
  if (s.size() != 26 || s[0] > '7') {
    return false;
  }
  for (char c : s) {
    bool found = false;
    for (char k : std::string_view(kCrockford)) {
      if (c == k) {
        found = true;
        break;
      }
    }
    if (!found) {
      return false;
    }
  }
  return true;
}

std::string sha256_hex(std::span<const std::byte> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  return sha256_hex(std::as_bytes(std::span(bytes.data(), bytes.size())));
}

bool is_sha256_hex(std::string_view s) noexcept {
  if (s.size() != 64) {
    return false;
  }
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace arabiq
