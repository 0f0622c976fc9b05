#ifndef PHISHTGL_ERRORS_HPP_
#define PHISHTGL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace phishtgl {

// Base class for all library errors. `code()` is a stable machine-readable
// identifier surfaced by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define PHISHTGL_DEFINE_ERROR(NAME, CODE)                    \
  class NAME : public Error {                                \
   public:                                                   \
    explicit NAME(const std::string& msg) : Error(CODE, msg) {} \
  }

PHISHTGL_DEFINE_ERROR(IoError, "io_error");
PHISHTGL_DEFINE_ERROR(SchemaError, "schema_error");
PHISHTGL_DEFINE_ERROR(EmptyInput, "empty_input");
PHISHTGL_DEFINE_ERROR(UnsortedInput, "unsorted_input");
PHISHTGL_DEFINE_ERROR(TimeRegression, "time_regression");
PHISHTGL_DEFINE_ERROR(NodeOutOfRange, "node_out_of_range");
PHISHTGL_DEFINE_ERROR(TooFewNodes, "too_few_nodes");
PHISHTGL_DEFINE_ERROR(ShapeError, "shape_error");
PHISHTGL_DEFINE_ERROR(ShapeMismatch, "shape_mismatch");
PHISHTGL_DEFINE_ERROR(NumericalError, "numerical_error");
PHISHTGL_DEFINE_ERROR(GraphError, "graph_error");
PHISHTGL_DEFINE_ERROR(EmptyBuffer, "empty_buffer");
PHISHTGL_DEFINE_ERROR(SingleClassError, "single_class_error");
PHISHTGL_DEFINE_ERROR(EmptyClass, "empty_class");
PHISHTGL_DEFINE_ERROR(InsufficientData, "insufficient_data");
PHISHTGL_DEFINE_ERROR(UnknownTarget, "unknown_target");
PHISHTGL_DEFINE_ERROR(UnknownRoot, "unknown_root");
PHISHTGL_DEFINE_ERROR(ConservationViolation, "conservation_violation");
PHISHTGL_DEFINE_ERROR(ConfigError, "config_error");

#undef PHISHTGL_DEFINE_ERROR

}  // namespace phishtgl

#endif  // PHISHTGL_ERRORS_HPP_
