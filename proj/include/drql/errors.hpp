#ifndef DRQL_ERRORS_HPP
#define DRQL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace drql {

// Precondition and validation failures throw std::invalid_argument.
// The two classes below cover the remaining failure kinds the CLI maps to
// distinct exit codes.

/// A numerical procedure could not deliver its contract (iteration cap,
/// level cap, non-finite iterate).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read, parsed or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace drql

#endif  // DRQL_ERRORS_HPP
