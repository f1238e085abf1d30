#pragma once

#include <stdexcept>
#include <string>

namespace masslab {

// Error taxonomy mirrored by the CLI exit codes (parse=2, resource=3,
// hypothesis-violation=4, check-failure=5).

struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct decode_error : std::runtime_error {
  explicit decode_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct shape_error : std::runtime_error {
  explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Frontier caps, index overflow, enumeration blow-ups. Reported, never
// silently truncated.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A witness construction was fed inputs violating its hypothesis.
struct hypothesis_violation : std::runtime_error {
  explicit hypothesis_violation(const std::string& msg) : std::runtime_error(msg) {}
};

struct construction_error : std::runtime_error {
  explicit construction_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace masslab
