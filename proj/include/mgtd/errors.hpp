#pragma once
// Error taxonomy. The CLI maps each family to a distinct exit code, so new
// error types should subclass one of the four families below.

#include <stdexcept>
#include <string>
#include <utility>

namespace mgtd {

// Bad or missing configuration (endpoints, data directory, flags).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data: registry documents, datasets, score files.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Anything that goes wrong talking to a completion backend.
struct GatewayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransportError : GatewayError {
  TransportError(const std::string& what, int attempts_made)
      : GatewayError(what), attempts(attempts_made) {}
  int attempts = 0;
};

struct AuthError : GatewayError {
  using GatewayError::GatewayError;
};

// The mock backend had no scripted reply matching the request.
struct ScriptMissError : GatewayError {
  using GatewayError::GatewayError;
};

// A backend reply could not be parsed into the expected structure.
// Carries the raw text for replay and debugging.
struct ReplyParseError : GatewayError {
  ReplyParseError(const std::string& what, std::string raw_text)
      : GatewayError(what), raw(std::move(raw_text)) {}
  std::string raw;
};

// A pipeline stage failed as a whole (tagged with the stage name).
struct PipelineError : std::runtime_error {
  PipelineError(std::string stage_name, const std::string& what)
      : std::runtime_error(stage_name + ": " + what), stage(std::move(stage_name)) {}
  std::string stage;
};

}  // namespace mgtd
