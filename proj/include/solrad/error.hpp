#pragma once

#include <stdexcept>
#include <string>

namespace solrad {

/**
 * @brief Error categories raised by the library.
 */
enum class ErrorCode {
  kDomain,
  kParse,
  kOutOfBounds,
  kLowSun,
  kEmptyInput,
  kMissingSlot,
  kDegenerateFit,
  kDegenerateDesign,
  kShape,
  kDivergence,
  kNoViableCandidate,
  kUndefinedMetric,
  kPairing,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

/**
 * @brief Exception carrying a machine-readable code next to the message.
 */
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace solrad
