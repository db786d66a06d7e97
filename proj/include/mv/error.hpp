#ifndef MV_ERROR_HPP
#define MV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text (scenario document, rules file, formula).
struct ParseError : Error {
    using Error::Error;
};

/// Well-formed input that violates a model invariant.
struct ValidationError : Error {
    using Error::Error;
};

/// Formula references an atom the trace does not declare, or an instant out of range.
struct EvaluationError : Error {
    using Error::Error;
};

}  // namespace mv

#endif  // MV_ERROR_HPP
