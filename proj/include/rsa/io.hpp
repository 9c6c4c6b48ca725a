#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rsa::io {

/// Writes to a sibling temp file, then renames over `path`, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);

std::string read_text_file(const std::filesystem::path& path);

/// Little-endian encode/decode, independent of host byte order.
std::vector<std::byte> encode_f32_le(std::span<const float> values);
std::vector<std::byte> encode_f64_le(std::span<const double> values);
std::vector<float> read_f32_le(const std::filesystem::path& path, std::size_t expected_count);
std::vector<double> read_f64_le(const std::filesystem::path& path, std::size_t expected_count);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace rsa::io
