#include "emo/learn/params.hpp"

#include <cmath>

#include "emo/error.hpp"

namespace emo {

void ParamReader::fail(const std::string& key, const std::string& what) const {
  throw HyperparameterError(owner_, key, what);
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback, std::int64_t min_value) {
  used_.insert(key);
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  const auto* v = std::get_if<std::int64_t>(&it->second);
  if (!v) fail(key, "must be an integer");
  if (*v < min_value) fail(key, "must be at least " + std::to_string(min_value));
  return *v;
}

double ParamReader::real(const std::string& key, double fallback) {
  used_.insert(key);
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  double v;
  if (const auto* d = std::get_if<double>(&it->second)) {
    v = *d;
  } else if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
    v = static_cast<double>(*i);
  } else {
    fail(key, "must be a number");
  }
  if (!std::isfinite(v)) fail(key, "must be finite");
  return v;
}

bool ParamReader::flag(const std::string& key, bool fallback) {
  used_.insert(key);
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  const auto* v = std::get_if<bool>(&it->second);
  if (!v) fail(key, "must be true or false");
  return *v;
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  const auto* v = std::get_if<std::string>(&it->second);
  if (!v) fail(key, "must be a string");
  return *v;
}

std::vector<std::int64_t> ParamReader::integers(const std::string& key, const std::vector<std::int64_t>& fallback,
                                                std::int64_t min_value) {
  used_.insert(key);
  const auto it = params_.find(key);
  if (it == params_.end()) return fallback;
  std::vector<std::int64_t> out;
  if (const auto* one = std::get_if<std::int64_t>(&it->second)) {
    out = {*one};
  } else if (const auto* list = std::get_if<std::vector<std::int64_t>>(&it->second)) {
    out = *list;
  } else {
    fail(key, "must be an integer or a list of integers");
  }
  if (out.empty()) fail(key, "must not be empty");
  for (auto v : out) {
    if (v < min_value) fail(key, "entries must be at least " + std::to_string(min_value));
  }
  return out;
}

void ParamReader::finish() const {
  for (const auto& [key, value] : params_) {
    if (!used_.count(key)) fail(key, "is not recognized");
  }
}

}  // namespace emo
