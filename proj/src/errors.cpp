#include "snlab/errors.hpp"

namespace snlab {

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::pole: return "pole";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::hypothesis: return "hypothesis_violation";
    case ErrorKind::resonance: return "resonance";
    case ErrorKind::parse: return "parse";
    case ErrorKind::bracket: return "bracket";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::seed_quality: return "seed_quality";
    case ErrorKind::saddle_degenerate: return "saddle_degenerate";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return 3;
    case ErrorKind::hypothesis: return 4;
    case ErrorKind::resonance: return 5;
    case ErrorKind::domain: return 6;
    case ErrorKind::bracket: return 7;
    case ErrorKind::stiffness: return 8;
    case ErrorKind::seed_quality: return 9;
    case ErrorKind::truncation: return 10;
    case ErrorKind::pole: return 11;
    case ErrorKind::saddle_degenerate: return 12;
    case ErrorKind::io: return 13;
  }
  return 1;
}

}  // namespace snlab
