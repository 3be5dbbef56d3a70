#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evc {

// Every failure raised by the toolkit derives from Error, so callers can
// catch the family or a specific kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Malformed file content; `location()` is a 1-based line for text formats
// and a byte offset for binary formats.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

class GeometryViolation : public Error {
 public:
  GeometryViolation(const std::string& what, std::size_t event_index)
      : Error(what), event_index_(event_index) {}
  std::size_t event_index() const noexcept { return event_index_; }

 private:
  std::size_t event_index_;
};

class TimestampRegression : public Error {
 public:
  TimestampRegression(const std::string& what, std::size_t event_index)
      : Error(what), event_index_(event_index) {}
  std::size_t event_index() const noexcept { return event_index_; }

 private:
  std::size_t event_index_;
};

class ImageTooSmall : public Error {
 public:
  using Error::Error;
};

class CountMismatch : public Error {
 public:
  using Error::Error;
};

class Misalignment : public Error {
 public:
  using Error::Error;
};

class RecallNotSpanned : public Error {
 public:
  using Error::Error;
};

class StreamTooShort : public Error {
 public:
  using Error::Error;
};

class InstrumentationUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace evc
