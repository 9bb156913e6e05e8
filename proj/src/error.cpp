#include "qge/error.hpp"

namespace qge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::domain: return "domain";
    case ErrorKind::index: return "index";
    case ErrorKind::postselection: return "postselection";
    case ErrorKind::orthogonality: return "orthogonality";
    case ErrorKind::exceptional_point: return "exceptional_point";
    case ErrorKind::preparation: return "preparation";
    case ErrorKind::invalid_parameters: return "invalid_parameters";
    case ErrorKind::phase_boundary: return "phase_boundary";
    case ErrorKind::gbz_degenerate: return "gbz_degenerate";
    case ErrorKind::ambiguous_branch: return "ambiguous_branch";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace qge
