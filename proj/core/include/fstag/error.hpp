#ifndef FSTAG_ERROR_HPP_
#define FSTAG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fstag {

// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed external data: corpus files, model files, inconsistent
// inventories.
class DataError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its contract (tag not in class,
// zero vector, threshold out of range).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Model file carries an unknown magic or version.
class FormatVersionError : public DataError {
 public:
  using DataError::DataError;
};

// Model file ends before the declared payload is complete.
class TruncatedModelError : public DataError {
 public:
  using DataError::DataError;
};

// Model file is structurally broken: dangling state index, symbol id
// outside its alphabet, duplicate arc.
class CorruptModelError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace fstag

#endif  // FSTAG_ERROR_HPP_
