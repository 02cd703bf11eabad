#include "qevote/errors.hpp"

namespace qevote {

const char* status_name(Status s) {
  switch (s) {
    case Status::ok: return "Ok";
    case Status::parameter: return "ParameterError";
    case Status::unitarity: return "UnitarityError";
    case Status::index: return "IndexError";
    case Status::capacity: return "CapacityError";
    case Status::domain: return "DomainError";
    case Status::protocol_order: return "ProtocolOrderError";
    case Status::quadrature: return "QuadratureError";
    case Status::estimator_overflow: return "EstimatorOverflow";
    case Status::estimator_empty: return "EstimatorEmpty";
    case Status::degenerate_sample: return "DegenerateSample";
    case Status::config: return "ConfigError";
    case Status::internal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace qevote
