#pragma once

#include <stdexcept>
#include <string>

namespace dqm {

// Exit codes shared by the CLI.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kBackend = 2,
  kMissingArtifact = 3,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Malformed input, violated precondition, bad configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kValidation; }
};

// Scorer backend failure (HTTP, protocol, zero vectors, ...).
class BackendError : public Error {
 public:
  using Error::Error;
  BackendError(const std::string& what, int retries)
      : Error(what + " (after " + std::to_string(retries) + " retries)"), retries_(retries) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kBackend; }
  int retries() const noexcept { return retries_; }

 private:
  int retries_ = 0;
};

// A pipeline stage needs an upstream artifact that is not on disk.
class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(const std::string& stage)
      : Error("requires: " + stage), stage_(stage) {}
  ExitCode exit_code() const noexcept override { return ExitCode::kMissingArtifact; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace dqm
