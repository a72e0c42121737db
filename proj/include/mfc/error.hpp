#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfc {

enum class ErrorKind {
  invalid_dimension,
  unstable_specification,
  not_hurwitz,
  degenerate_input_channel,
  numeric_overflow,
  relative_degree_violation,
  matching_violation,
  gain_infeasible,
  degenerate_control,
  divergence,
  bound_violation,
  differentiator_divergence,
  config,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace mfc
