#pragma once

#include <stdexcept>
#include <string>

namespace qge {

enum class ErrorKind {
  dimension,
  numerical,
  domain,
  index,
  postselection,
  orthogonality,
  exceptional_point,
  preparation,
  invalid_parameters,
  phase_boundary,
  gbz_degenerate,
  ambiguous_branch,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of every error thrown by the library. The kind is stable and is what
// the CLI serializes into its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define QGE_DEFINE_ERROR(Name, Kind)                                       \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

QGE_DEFINE_ERROR(DimensionError, dimension)
QGE_DEFINE_ERROR(NumericalError, numerical)
QGE_DEFINE_ERROR(DomainError, domain)
QGE_DEFINE_ERROR(IndexError, index)
QGE_DEFINE_ERROR(PostselectionError, postselection)
QGE_DEFINE_ERROR(OrthogonalityError, orthogonality)
QGE_DEFINE_ERROR(ExceptionalPointError, exceptional_point)
QGE_DEFINE_ERROR(PreparationError, preparation)
QGE_DEFINE_ERROR(InvalidParametersError, invalid_parameters)
QGE_DEFINE_ERROR(PhaseBoundaryError, phase_boundary)
QGE_DEFINE_ERROR(GbzDegenerateError, gbz_degenerate)
QGE_DEFINE_ERROR(AmbiguousBranchError, ambiguous_branch)
QGE_DEFINE_ERROR(IoError, io)

#undef QGE_DEFINE_ERROR

}  // namespace qge
