#pragma once

#include <stdexcept>
#include <string>

namespace lps {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model-space configuration has no real solution (non-realizable hinge,
/// size bound exceeded, point off the de Sitter quadric, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Matrix or index dimensions are inconsistent.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Two points were required to be chronologically related and are not.
class NotChronological : public Error {
 public:
  using Error::Error;
};

class GeodesicDeficit : public Error {
 public:
  using Error::Error;
};

class MissingChains : public Error {
 public:
  using Error::Error;
};

/// Equality case of the comparison condition does not hold on the sample.
class RigidityViolated : public Error {
 public:
  using Error::Error;
};

class OrderViolated : public Error {
 public:
  using Error::Error;
};

/// A finite search window was too small to decide an existential statement.
/// Distinct from a refutation.
class WindowExhausted : public Error {
 public:
  using Error::Error;
};

class NotParallel : public Error {
 public:
  using Error::Error;
};

class NotInPast : public Error {
 public:
  using Error::Error;
};

class StripInconsistent : public Error {
 public:
  using Error::Error;
};

class MissingMetric : public Error {
 public:
  using Error::Error;
};

class NoSeries : public Error {
 public:
  using Error::Error;
};

}  // namespace lps
