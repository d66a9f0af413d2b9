#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace emo {

// Little-endian primitive encoding for model files.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v);
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(std::string_view s);
  void f64s(std::span<const double> v);
  void bytes(std::span<const std::uint8_t> v);
  void strings(const std::vector<std::string>& v);

  template <typename Derived>
  void matrix(const Eigen::DenseBase<Derived>& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }

 private:
  std::ostream& out_;
};

// Throws FormatError on truncated or implausible input.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  bool boolean();
  std::string str();
  std::vector<double> f64s();
  std::vector<std::uint8_t> bytes();
  std::vector<std::string> strings();

  template <typename Matrix>
  Matrix matrix() {
    const auto rows = static_cast<Eigen::Index>(length());
    const auto cols = static_cast<Eigen::Index>(length());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }

  // A u64 length prefix, rejected when absurdly large.
  std::uint64_t length();

 private:
  void read(void* dst, std::size_t n);
  std::istream& in_;
};

}  // namespace emo
