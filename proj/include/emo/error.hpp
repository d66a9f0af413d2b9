#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace emo {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required column or field is missing from an input.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cell or token could not be parsed; messages carry the row or line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class NoLabelsError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration (tokenizer, reduction, classifier, runner).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A single bad hyperparameter; `key` names it so callers can point at it.
class HyperparameterError : public ConfigError {
 public:
  HyperparameterError(const std::string& owner, std::string key, std::string detail)
      : ConfigError(owner + ": hyperparameter '" + key + "' " + detail), key_(std::move(key)), detail_(std::move(detail)) {}

  const std::string& key() const noexcept { return key_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string key_;
  std::string detail_;
};

// Malformed vector or model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Expected document ids are missing from an embedding file.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class EmptyVocabularyError : public Error {
 public:
  using Error::Error;
};

// The language model answered, but without any supported language name.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& message, std::string reply)
      : Error(message), reply_(std::move(reply)) {}
  const std::string& reply() const noexcept { return reply_; }

 private:
  std::string reply_;
};

// The chat endpoint could not be reached or answered with a failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

class UnresolvedLanguageError : public Error {
 public:
  using Error::Error;
};

}  // namespace emo
