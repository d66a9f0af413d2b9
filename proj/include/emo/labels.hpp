#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace emo {

inline constexpr std::size_t kNumEmotions = 6;

// Fixed slot order used by every file format and matrix in the project.
inline constexpr std::array<std::string_view, kNumEmotions> kEmotionNames = {
    "anger", "disgust", "fear", "joy", "sadness", "surprise"};

enum class Emotion : std::uint8_t { anger, disgust, fear, joy, sadness, surprise };

// Six binary indicators; any subset (including none) is valid.
struct EmotionLabels {
  std::array<std::uint8_t, kNumEmotions> bits{};

  std::uint8_t& operator[](std::size_t i) { return bits[i]; }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::uint8_t& operator[](Emotion e) { return bits[static_cast<std::size_t>(e)]; }
  std::uint8_t operator[](Emotion e) const { return bits[static_cast<std::size_t>(e)]; }

  friend bool operator==(const EmotionLabels&, const EmotionLabels&) = default;
};

// Dense row-major binary matrix (rows = samples, cols = labels).
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::uint8_t& operator()(std::size_t r, std::size_t c) { return bits_[r * cols_ + c]; }
  std::uint8_t operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c]; }

  std::span<std::uint8_t> row(std::size_t r) { return {bits_.data() + r * cols_, cols_}; }
  std::span<const std::uint8_t> row(std::size_t r) const { return {bits_.data() + r * cols_, cols_}; }

  const std::vector<std::uint8_t>& data() const noexcept { return bits_; }

  // Throws ParseError naming the first entry outside {0,1}.
  void check_binary() const;

  LabelMatrix select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace emo
