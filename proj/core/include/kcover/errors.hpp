#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kcover {

/// Base class for all kcover domain errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class HeightOutOfRange : public Error {
 public:
  HeightOutOfRange(std::size_t cell, double value, const std::string& msg)
      : Error(msg), cell(cell), value(value) {}
  std::size_t cell;
  double value;
};

class NoFreeCells : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(long line, long offset, const std::string& msg)
      : Error(msg), line(line), offset(offset) {}
  long line;
  long offset;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class OrderExceedsCount : public Error {
 public:
  using Error::Error;
};

class WeightCountMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidWeights : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EmptyCandidateSet : public Error {
 public:
  using Error::Error;
};

class DegenerateFreeSpace : public Error {
 public:
  using Error::Error;
};

class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

class TooFewRecords : public Error {
 public:
  using Error::Error;
};

}  // namespace kcover
