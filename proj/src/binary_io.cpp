#include "emo/binary_io.hpp"

#include <bit>
#include <cstring>

#include "emo/error.hpp"

namespace emo {
namespace {
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 34;
}

void BinaryWriter::u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

void BinaryWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::f64s(std::span<const double> v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void BinaryWriter::bytes(std::span<const std::uint8_t> v) {
  u64(v.size());
  out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size()));
}

void BinaryWriter::strings(const std::vector<std::string>& v) {
  u64(v.size());
  for (const auto& s : v) str(s);
}

void BinaryReader::read(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("model file truncated");
}

std::uint8_t BinaryReader::u8() {
  std::uint8_t v;
  read(&v, 1);
  return v;
}

std::uint32_t BinaryReader::u32() {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
  return v;
}

std::uint64_t BinaryReader::u64() {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

bool BinaryReader::boolean() {
  const auto v = u8();
  if (v > 1) throw FormatError("model file: invalid boolean");
  return v == 1;
}

std::uint64_t BinaryReader::length() {
  const auto n = u64();
  if (n > kMaxLength) throw FormatError("model file: implausible length " + std::to_string(n));
  return n;
}

std::string BinaryReader::str() {
  std::string s(length(), '\0');
  if (!s.empty()) read(s.data(), s.size());
  return s;
}

std::vector<double> BinaryReader::f64s() {
  std::vector<double> v(length());
  for (auto& x : v) x = f64();
  return v;
}

std::vector<std::uint8_t> BinaryReader::bytes() {
  std::vector<std::uint8_t> v(length());
  if (!v.empty()) read(v.data(), v.size());
  return v;
}

std::vector<std::string> BinaryReader::strings() {
  std::vector<std::string> v(length());
  for (auto& s : v) s = str();
  return v;
}

}  // namespace emo
