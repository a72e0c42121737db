#include "mfc/error.hpp"

namespace mfc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid dimension";
    case ErrorKind::unstable_specification: return "unstable specification";
    case ErrorKind::not_hurwitz: return "not Hurwitz";
    case ErrorKind::degenerate_input_channel: return "degenerate input channel";
    case ErrorKind::numeric_overflow: return "numeric overflow";
    case ErrorKind::relative_degree_violation: return "relative degree violation";
    case ErrorKind::matching_violation: return "matched/unmatched invariance violated";
    case ErrorKind::gain_infeasible: return "gain infeasible";
    case ErrorKind::degenerate_control: return "degenerate control coefficient";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::bound_violation: return "bound violation";
    case ErrorKind::differentiator_divergence: return "differentiator divergence";
    case ErrorKind::config: return "config error";
  }
  return "error";
}

}  // namespace mfc
