#pragma once

#include <stdexcept>
#include <string>

namespace anchordoc {

// Error codes across all modules. Callers match on code(), not on message text.
enum class Errc {
  // layout grammar
  UnknownDocType,
  UnknownLabel,
  MalformedBBox,
  UnknownAttribute,
  InvalidResult,
  OutOfRange,
  // model backend
  FixtureMiss,
  Transport,
  Protocol,
  RateLimited,
  Encoding,
  // pipeline
  DegenerateRegion,
  NotParseable,
  LayoutParse,
  BatchFailed,
  // assembler
  IncompatibleContent,
  // metrics
  BothMustBeDigital,
  EmptyInput,
  // datagen
  Range,
  NonConvex,
  AmplitudeTooLarge,
  // io / config
  Io,
  Config,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace anchordoc
