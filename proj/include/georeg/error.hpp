#pragma once

#include <stdexcept>
#include <string>

namespace georeg {

enum class ErrorKind {
  config,      // invalid or inconsistent parameters
  shape,       // dimension mismatch between operands
  numeric,     // non-finite values, failed decompositions
  contract,    // caller violated a documented precondition
  degenerate,  // a projected direction vanished
  experiment,  // an experiment produced no usable samples
  io,          // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorKind::shape, what) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};
struct ContractError : Error {
  explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};
struct ExperimentError : Error {
  explicit ExperimentError(const std::string& what) : Error(ErrorKind::experiment, what) {}
};
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

enum class DegenerateSide { parallel, perpendicular };

struct DegenerateDirectionError : Error {
  DegenerateDirectionError(DegenerateSide side, const std::string& what)
      : Error(ErrorKind::degenerate, what), side(side) {}
  DegenerateSide side;
};

}  // namespace georeg
