#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace postproj {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double stationarity, double primal)
      : Error(what), stationarity_(stationarity), primal_(primal) {}
  double stationarity() const noexcept { return stationarity_; }
  double primal() const noexcept { return primal_; }

 private:
  double stationarity_;
  double primal_;
};

// Raised when the nearest point of a non-convex set is not unique.
class NonUniqueProjection : public Error {
 public:
  NonUniqueProjection(const std::string& what, double sigma_min)
      : Error(what), sigma_min_(sigma_min) {}
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double sigma_min_;
};

class Degenerate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row),
        column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace postproj
