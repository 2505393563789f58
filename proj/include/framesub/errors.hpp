#ifndef FRAMESUB_ERRORS_HPP
#define FRAMESUB_ERRORS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace framesub {

enum class ErrorCode {
  invalid_input,
  invalid_config,
  invalid_model,
  capability,
  io_failure,
  barrier_violation,
  selection_failure,
  internal_invariant,
  rank_deficient,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::invalid_model: return "invalid-model";
    case ErrorCode::capability: return "capability";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::barrier_violation: return "barrier-violation";
    case ErrorCode::selection_failure: return "selection-failure";
    case ErrorCode::internal_invariant: return "internal-invariant";
    case ErrorCode::rank_deficient: return "rank-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // True for errors a caller can fix by changing the invocation.
  bool is_validation() const {
    return code_ == ErrorCode::invalid_input || code_ == ErrorCode::invalid_config ||
           code_ == ErrorCode::invalid_model || code_ == ErrorCode::capability ||
           code_ == ErrorCode::io_failure;
  }

  std::optional<std::int64_t> iteration;  // selection failures carry the iteration
  std::optional<double> sigma_min;        // rank errors carry the smallest singular value

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid_input(const std::string& message) {
  throw Error(ErrorCode::invalid_input, message);
}

[[noreturn]] inline void throw_invalid_config(const std::string& message) {
  throw Error(ErrorCode::invalid_config, message);
}

}  // namespace framesub

#endif  // FRAMESUB_ERRORS_HPP
