#pragma once

#include <stdexcept>
#include <string>

namespace gsp {

// Base for all library-raised errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments, malformed structures, out-of-range parameters.
struct InvalidArgument : Error {
    using Error::Error;
};

// Graph has an odd cycle; no proper 2-coloring exists.
struct NotBicolorable : Error {
    using Error::Error;
};

// ExpectationTable lookup failed; message names the missing mask.
struct MissingEntry : Error {
    explicit MissingEntry(const std::string& mask)
        : Error("missing expectation table entry for mask " + mask), mask_name(mask) {}
    std::string mask_name;
};

// Dense simulator qubit caps are hard limits.
struct SizeCapExceeded : Error {
    using Error::Error;
};

// Config file failed validation; field carries the JSON path.
struct ConfigError : Error {
    ConfigError(const std::string& field_path, const std::string& what)
        : Error(field_path + ": " + what), field(field_path) {}
    std::string field;
};

// Numerical procedure could not produce a result (e.g. threshold family
// with no fixed point at p2 = 0, or efficiency bound with P0 >= Pth).
struct NumericalFailure : Error {
    using Error::Error;
};

}  // namespace gsp
