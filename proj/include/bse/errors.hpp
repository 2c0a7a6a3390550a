#ifndef BSE_ERRORS_HPP
#define BSE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bse {

// Error taxonomy shared by the C++ core and the C API status codes.
enum class ErrorKind {
  InvalidArgument,  // bad parameters or preconditions
  Io,               // file system failures
  Format,           // parse/schema violations in input files
  Invariant,        // a domain invariant does not hold (bad mesh, ...)
  Numeric,          // numerical failure (loss of definiteness, step collapse)
  NonConvergence,   // iteration cap reached before tolerance
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace bse

#endif
