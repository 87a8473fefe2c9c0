#pragma once

#include <stdexcept>
#include <string>

namespace fracture {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FRACTURE_ERROR_KIND(Name)                         \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(const std::string& what) : Error(what) {} \
  };

FRACTURE_ERROR_KIND(InadmissibleParams)
FRACTURE_ERROR_KIND(AdaptationFailed)
FRACTURE_ERROR_KIND(DegenerateTriangle)
FRACTURE_ERROR_KIND(MeshFieldMismatch)
FRACTURE_ERROR_KIND(InconsistentHistory)
FRACTURE_ERROR_KIND(SingularSystem)
FRACTURE_ERROR_KIND(NonConvergence)
FRACTURE_ERROR_KIND(PreconditionViolated)
FRACTURE_ERROR_KIND(ValidationError)
FRACTURE_ERROR_KIND(IoError)

#undef FRACTURE_ERROR_KIND

// Config parse failure with the offending line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& key, const std::string& reason)
      : Error("line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") + ": " + reason),
        line_(line),
        key_(key) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace fracture
