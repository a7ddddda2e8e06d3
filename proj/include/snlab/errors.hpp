#pragma once

#include <stdexcept>
#include <string>

namespace snlab {

enum class ErrorKind {
  domain,
  pole,
  truncation,
  hypothesis,
  resonance,
  parse,
  bracket,
  stiffness,
  seed_quality,
  saddle_degenerate,
  io
};

// Base of every error raised by the library. Each kind maps to a
// distinct process exit code in the command-line front end.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SNLAB_ERROR_TYPE(Name, Kind)                         \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what)                   \
        : Error(ErrorKind::Kind, what) {}                    \
  };

SNLAB_ERROR_TYPE(DomainError, domain)
SNLAB_ERROR_TYPE(PoleError, pole)
SNLAB_ERROR_TYPE(TruncationError, truncation)
SNLAB_ERROR_TYPE(HypothesisViolation, hypothesis)
SNLAB_ERROR_TYPE(ResonanceError, resonance)
SNLAB_ERROR_TYPE(ParseError, parse)
SNLAB_ERROR_TYPE(BracketError, bracket)
SNLAB_ERROR_TYPE(StiffnessError, stiffness)
SNLAB_ERROR_TYPE(SeedQualityError, seed_quality)
SNLAB_ERROR_TYPE(SaddleDegenerateError, saddle_degenerate)
SNLAB_ERROR_TYPE(IoError, io)

#undef SNLAB_ERROR_TYPE

const char* kind_name(ErrorKind kind);
int exit_code(ErrorKind kind);

}  // namespace snlab
