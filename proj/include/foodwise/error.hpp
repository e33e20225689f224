#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace foodwise {

enum class Errc {
  MissingCategory,
  UnknownCategory,
  OutOfRange,
  MalformedDocument,
  MissingField,
  NegativeArea,
  InvalidProfile,
  InsufficientSamples,
  DegenerateX,
  AllZero,
  MixedMonths,
  InvalidArgument,
  InvalidRange,
  InvalidTimezone,
  StorageUnavailable,
  NotFound,
  Conflict,
  BlobTooLarge,
  BadConfig,
  BadSpec,
  PortInUse,
};

std::string_view to_string(Errc code) noexcept;

// Every failure surfaced by the library carries a machine-readable code.
// `subject` names the offending field or category when there is one.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string subject = {})
      : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

  Errc code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  Errc code_;
  std::string subject_;
};

}  // namespace foodwise
