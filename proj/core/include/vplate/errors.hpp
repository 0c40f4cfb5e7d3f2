#pragma once

#include <stdexcept>
#include <string>

namespace vplate {

// Error with a stable machine-readable code ("empty-mesh", "invalid-vertex", ...)
// plus a human message.
class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace vplate
