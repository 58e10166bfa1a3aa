#pragma once

#include <stdexcept>
#include <string>

namespace convforge {

/// Base of every error raised by the library.
///
/// Errors split into two families that the command-line tool maps onto
/// distinct exit codes: ValidationError (bad input, exit 2) and
/// NumericalError (a computation that could not reach its tolerance, exit 3).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public ValidationError {
 public:
  explicit InvalidArgument(const std::string& message)
      : ValidationError("InvalidArgument", message) {}
};

class MaskTooLong : public ValidationError {
 public:
  MaskTooLong(int degree, int s)
      : ValidationError("MaskTooLong", "mask degree " + std::to_string(degree) +
                                           " exceeds filter length parameter s=" +
                                           std::to_string(s)) {}
};

class DimensionMismatch : public ValidationError {
 public:
  explicit DimensionMismatch(const std::string& message)
      : ValidationError("DimensionMismatch", message) {}
};

class ZeroSequence : public ValidationError {
 public:
  ZeroSequence() : ValidationError("ZeroSequence", "cannot factorize the all-zero sequence") {}
};

class DepthTooSmall : public ValidationError {
 public:
  DepthTooSmall(int depth, int minimal_depth)
      : ValidationError("DepthTooSmall", "depth J=" + std::to_string(depth) +
                                             " is below the admissible minimum J=" +
                                             std::to_string(minimal_depth)),
        minimal_depth_(minimal_depth) {}

  int minimal_depth() const noexcept { return minimal_depth_; }

 private:
  int minimal_depth_;
};

class UnstructuredBias : public ValidationError {
 public:
  explicit UnstructuredBias(int layer)
      : ValidationError("UnstructuredBias", "bias of layer " + std::to_string(layer) +
                                                " does not repeat its middle component"),
        layer_(layer) {}

  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

class DidNotConverge : public NumericalError {
 public:
  DidNotConverge(const std::string& what, double worst_residual)
      : NumericalError("DidNotConverge",
                       what + " (worst residual " + std::to_string(worst_residual) + ")"),
        worst_residual_(worst_residual) {}

  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

class DegenerateScale : public NumericalError {
 public:
  DegenerateScale()
      : NumericalError("DegenerateScale",
                       "activation bound B^(J) is zero; the mask chain annihilates every input") {}
};

}  // namespace convforge
