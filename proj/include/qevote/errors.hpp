#pragma once

#include <stdexcept>
#include <string>

namespace qevote {

// Numeric values are shared with the C API (qev_status).
enum class Status : int {
  ok = 0,
  parameter = 1,
  unitarity = 2,
  index = 3,
  capacity = 4,
  domain = 5,
  protocol_order = 6,
  quadrature = 7,
  estimator_overflow = 8,
  estimator_empty = 9,
  degenerate_sample = 10,
  config = 11,
  internal = 12,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& what) : std::runtime_error(what), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

#define QEVOTE_DEFINE_ERROR(Name, code)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(Status::code, what) {} \
  };

QEVOTE_DEFINE_ERROR(ParameterError, parameter)
QEVOTE_DEFINE_ERROR(UnitarityError, unitarity)
QEVOTE_DEFINE_ERROR(IndexError, index)
QEVOTE_DEFINE_ERROR(CapacityError, capacity)
QEVOTE_DEFINE_ERROR(DomainError, domain)
QEVOTE_DEFINE_ERROR(ProtocolOrderError, protocol_order)
QEVOTE_DEFINE_ERROR(QuadratureError, quadrature)
QEVOTE_DEFINE_ERROR(EstimatorOverflow, estimator_overflow)
QEVOTE_DEFINE_ERROR(EstimatorEmpty, estimator_empty)
QEVOTE_DEFINE_ERROR(DegenerateSample, degenerate_sample)
QEVOTE_DEFINE_ERROR(ConfigError, config)
QEVOTE_DEFINE_ERROR(InternalError, internal)

#undef QEVOTE_DEFINE_ERROR

}  // namespace qevote
