#pragma once

#include <stdexcept>
#include <string>

namespace cq {

// All library failures surface as one exception type; `kind` tells callers
// which contract was broken.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    io,          // file not readable/writable
    schema,      // missing/unknown column or field
    parse,       // malformed cell or document
    integrity,   // duplicate ids, inconsistent lengths
    contract,    // precondition violated by the caller
    generation,  // synthetic data request impossible to satisfy
    refused,     // oracle size cap exceeded
  };

  Error(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void throw_error(Error::Kind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace cq
