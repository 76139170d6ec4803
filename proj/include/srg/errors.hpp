#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace srg {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatches, invalid arguments, bad grids.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// An operation's documented precondition does not hold for the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class HormanderViolation : public PreconditionError {
 public:
  HormanderViolation(const std::string& msg, int achieved_dim)
      : PreconditionError(msg), achieved_dim_(achieved_dim) {}
  int achieved_dim() const { return achieved_dim_; }

 private:
  int achieved_dim_;
};

/// A monomial of weighted order <= -2 was found: the coordinates are not
/// privileged for this frame.
class NotPrivileged : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// v does not lie in the span of the frame at x.
class InfiniteForm : public Error {
 public:
  using Error::Error;
};

class FlowExit : public Error {
 public:
  FlowExit(const std::string& msg, double exit_time) : Error(msg), exit_time_(exit_time) {}
  double exit_time() const { return exit_time_; }

 private:
  double exit_time_;
};

class CharacteristicPoint : public PreconditionError {
 public:
  CharacteristicPoint(const std::string& msg, std::vector<double> point)
      : PreconditionError(msg), point_(std::move(point)) {}
  const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

class DegenerateLevelSet : public PreconditionError {
 public:
  DegenerateLevelSet(const std::string& msg, std::vector<double> where)
      : PreconditionError(msg), where_(std::move(where)) {}
  const std::vector<double>& where() const { return where_; }

 private:
  std::vector<double> where_;
};

/// dim Lie{hat X} != n at the base point: no group law is produced.
class IsotropyNotVerified : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DegenerateNormal : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace srg
