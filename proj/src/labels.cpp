#include "emo/labels.hpp"

#include <string>

#include "emo/error.hpp"

namespace emo {

void LabelMatrix::check_binary() const {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] > 1) {
      throw ParseError("label matrix entry (" + std::to_string(i / cols_) + ", " + std::to_string(i % cols_) +
                       ") = " + std::to_string(bits_[i]) + " is not binary");
    }
  }
}

LabelMatrix LabelMatrix::select_rows(std::span<const std::size_t> indices) const {
  LabelMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace emo
