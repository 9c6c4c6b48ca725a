#include "rsa/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rsa/error.hpp"

namespace rsa::io {

namespace fs = std::filesystem;

namespace {

template <typename Word>
Word to_little(Word w) {
  if constexpr (std::endian::native == std::endian::big) {
    Word out = 0;
    for (std::size_t i = 0; i < sizeof(Word); ++i) {
      out = static_cast<Word>((out << 8) | ((w >> (8 * i)) & 0xFF));
    }
    return out;
  } else {
    return w;
  }
}

template <typename Float, typename Word>
std::vector<std::byte> encode_le(std::span<const Float> values) {
  std::vector<std::byte> out(values.size() * sizeof(Float));
  for (std::size_t i = 0; i < values.size(); ++i) {
    Word w = to_little(std::bit_cast<Word>(values[i]));
    std::memcpy(out.data() + i * sizeof(Float), &w, sizeof(Word));
  }
  return out;
}

template <typename Float, typename Word>
std::vector<Float> read_le(const fs::path& path, std::size_t expected_count) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, "missing binary file " + path.string());
  }
  const auto size = fs::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot stat " + path.string());
  const auto expected_bytes = expected_count * sizeof(Float);
  if (size != expected_bytes) {
    throw Error(ErrorCode::SizeMismatch, path.string() + " has " + std::to_string(size) +
                                             " bytes, expected " + std::to_string(expected_bytes));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::byte> raw(expected_bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw Error(ErrorCode::IoError, "short read on " + path.string());

  std::vector<Float> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    Word w;
    std::memcpy(&w, raw.data() + i * sizeof(Float), sizeof(Word));
    out[i] = std::bit_cast<Float>(to_little(w));
  }
  return out;
}

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::byte> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::IoError, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  write_file_atomic(path, std::as_bytes(std::span(contents.data(), contents.size())));
}

std::string read_text_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, "missing file " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::byte> encode_f32_le(std::span<const float> values) {
  return encode_le<float, std::uint32_t>(values);
}

std::vector<std::byte> encode_f64_le(std::span<const double> values) {
  return encode_le<double, std::uint64_t>(values);
}

std::vector<float> read_f32_le(const fs::path& path, std::size_t expected_count) {
  return read_le<float, std::uint32_t>(path, expected_count);
}

std::vector<double> read_f64_le(const fs::path& path, std::size_t expected_count) {
  return read_le<double, std::uint64_t>(path, expected_count);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error(ErrorCode::IoError, "cannot format double");
  return std::string(buf, ptr);
}

}  // namespace rsa::io
