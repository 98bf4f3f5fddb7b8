#pragma once

#include <stdexcept>
#include <string>

namespace siftwood {

// Every library failure derives from Error so callers (the CLI in particular)
// can map categories to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ModelMismatch : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Raised when an image yields no keypoints and therefore has no histogram.
class NoKeypointsError : public Error {
 public:
  using Error::Error;
};

}  // namespace siftwood
