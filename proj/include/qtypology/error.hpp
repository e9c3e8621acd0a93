#pragma once

#include <stdexcept>
#include <string>

namespace qtypology {

// Error classes map one-to-one onto CLI exit codes (see exit_code()).
enum class ErrorKind {
  kInvalidInput = 1,     // malformed file, bad record, empty sentence
  kValidation = 2,       // config / parameter out of range
  kMissingArtifact = 3,  // predecessor stage output absent
  kInfeasible = 4,       // e.g. fewer points than clusters
  kAlignment = 5,        // label mismatch between matrices
  kCorrupt = 6,          // truncated / damaged binary container
  kIncompatible = 7,     // container version mismatch
  kDegenerate = 8,       // statistic undefined on the given sample
  kIo = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return 10 + static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kMissingArtifact: return "missing-artifact";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kCorrupt: return "corrupt";
    case ErrorKind::kIncompatible: return "incompatible";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace qtypology
