#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace safedet {

// Absolute tolerance for every geometric predicate (meters).
inline constexpr double kGeomTol = 1e-9;
// Polygons below this area (m^2) are treated as empty.
inline constexpr double kMinArea = 1e-12;
inline constexpr double kDefaultEpsDepth = 1e-6;
inline constexpr double kDefaultEpsDist = 1e-6;

enum class ErrorKind {
  NonPositiveDepth,
  BehindCamera,
  EmptyGroundTruth,
  OriginInsidePolygon,
  DegenerateDistance,
  InvalidBox,
  MissingCamera,
  SchemaError,
  UnmappedLabel,
  ValidationError,
  ConfigError,
  InvariantViolation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::OriginInsidePolygon: return "OriginInsidePolygon";
    case ErrorKind::DegenerateDistance: return "DegenerateDistance";
    case ErrorKind::InvalidBox: return "InvalidBox";
    case ErrorKind::MissingCamera: return "MissingCamera";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnmappedLabel: return "UnmappedLabel";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

// Process exit code associated with an error kind: 2 data, 3 config, 4 internal.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError: return 3;
    case ErrorKind::InvariantViolation: return 4;
    default: return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on up to `workers` threads using a static
// contiguous partition. fn must only write to slots owned by index i.
// The first exception thrown (lowest chunk) is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(workers, n);
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace safedet
