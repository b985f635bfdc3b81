#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace arabiq {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();

// "2025-03-01T12:30:05.123Z"
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view s);

}  // namespace arabiq
