#include "foodwise/error.hpp"

namespace foodwise {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingCategory: return "MissingCategory";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::MalformedDocument: return "MalformedDocument";
    case Errc::MissingField: return "MissingField";
    case Errc::NegativeArea: return "NegativeArea";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::DegenerateX: return "DegenerateX";
    case Errc::AllZero: return "AllZero";
    case Errc::MixedMonths: return "MixedMonths";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::InvalidTimezone: return "InvalidTimezone";
    case Errc::StorageUnavailable: return "StorageUnavailable";
    case Errc::NotFound: return "NotFound";
    case Errc::Conflict: return "Conflict";
    case Errc::BlobTooLarge: return "BlobTooLarge";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadSpec: return "BadSpec";
    case Errc::PortInUse: return "PortInUse";
  }
  return "Unknown";
}

}  // namespace foodwise
