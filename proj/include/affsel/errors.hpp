#pragma once

#include <stdexcept>
#include <string>

namespace affsel {

// Problems caused by caller-supplied data or configuration: malformed files,
// out-of-range parameters, contract violations. The CLI maps these to exit
// code 2; anything else escaping a command is treated as internal (exit 1).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace affsel
