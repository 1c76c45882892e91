#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rotorvib {

/// Raw sample files are 32-bit little-endian IEEE floats, no header.
void write_f32(const std::filesystem::path& path, std::span<const float> data);
std::vector<float> read_f32(const std::filesystem::path& path);

void write_bytes(const std::filesystem::path& path,
                 std::span<const std::uint8_t> data);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace rotorvib
