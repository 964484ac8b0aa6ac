#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gptd {

// Caller broke a documented precondition (shape mismatch, invalid argument).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization or a clamped quantity failed after the documented jitter.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::optional<long> minor_index = std::nullopt)
      : std::runtime_error(what), minor_index_(minor_index) {}

  // Leading minor at which a Cholesky factorization broke down, if known.
  std::optional<long> minor_index() const { return minor_index_; }

 private:
  std::optional<long> minor_index_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace gptd
