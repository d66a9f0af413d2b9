#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "emo/learn/classifier.hpp"

namespace emo {

// Typed, validated access to a hyperparameter map. finish() rejects any key
// that was never read.
class ParamReader {
 public:
  ParamReader(const Hyperparameters& params, std::string_view owner) : params_(params), owner_(owner) {}

  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t min_value);
  double real(const std::string& key, double fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  // Accepts a single integer or a list of integers.
  std::vector<std::int64_t> integers(const std::string& key, const std::vector<std::int64_t>& fallback,
                                     std::int64_t min_value);
  bool has(const std::string& key) const { return params_.count(key) != 0; }

  void finish() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

  const Hyperparameters& params_;
  std::string owner_;
  std::set<std::string> used_;
};

}  // namespace emo
