#pragma once

#include <stdexcept>
#include <string>

namespace gssl {

// Error taxonomy. The CLI maps these onto exit codes:
//   ConfigError -> 1, DataError (and ParseError) -> 2, everything else -> 3.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error("shape error: " + msg) {}
};

// Violated call contract (bad argument, wrong state).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& msg) : Error("contract error: " + msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error("data error: " + msg) {}
};

// Malformed input file; message carries file name and, where known, line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& file, long line, const std::string& msg)
      : DataError(file + (line >= 0 ? ":" + std::to_string(line) : "") + ": " + msg) {}
};

class MethodError : public Error {
 public:
  explicit MethodError(const std::string& msg) : Error("method error: " + msg) {}
};

class TrainError : public Error {
 public:
  explicit TrainError(const std::string& msg) : Error("training error: " + msg) {}
};

}  // namespace gssl
