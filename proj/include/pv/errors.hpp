#pragma once

#include <stdexcept>
#include <string>

namespace pv {

// Error taxonomy used across the library. Every throw site tags the module
// in the message ("domain:", "solver:", ...) so CLI output stays traceable.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };        // point outside domain
struct SingularityError : Error { using Error::Error; };   // G(x,x) requested
struct ResolutionError : Error { using Error::Error; };    // grid too coarse
struct ContractError : Error { using Error::Error; };      // precondition breach
struct InfeasibleError : Error { using Error::Error; };    // patch does not fit
struct ConfigError : Error { using Error::Error; };        // bad run configuration
struct IoError : Error { using Error::Error; };            // file read/write failure
struct InternalError : Error { using Error::Error; };      // invariant breach (bug)

} // namespace pv
