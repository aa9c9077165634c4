#pragma once

#include <stdexcept>
#include <string>

namespace fracrot {

/// Base class for every error raised by the library. `kind()` is a stable,
/// machine-readable name used by the CLI error envelope.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FRACROT_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  }

FRACROT_DEFINE_ERROR(SingularMatrix);
FRACROT_DEFINE_ERROR(InvalidAxis);
FRACROT_DEFINE_ERROR(NotARotation);
FRACROT_DEFINE_ERROR(DomainAlpha);
FRACROT_DEFINE_ERROR(OutOfPrincipalDomain);
FRACROT_DEFINE_ERROR(InadmissibleSpectrum);
FRACROT_DEFINE_ERROR(QuadratureNotConverged);
FRACROT_DEFINE_ERROR(DegenerateEigenbasis);
FRACROT_DEFINE_ERROR(NumericalResidue);

#undef FRACROT_DEFINE_ERROR

}  // namespace fracrot
