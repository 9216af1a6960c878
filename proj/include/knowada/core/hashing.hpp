#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace knowada {

std::array<std::uint8_t, 32> sha256(std::string_view data);
std::string sha256_hex(std::string_view data);

// Hex SHA-256 of a file's bytes; throws Error(io) when unreadable.
std::string file_digest(const std::filesystem::path& path);

}  // namespace knowada
