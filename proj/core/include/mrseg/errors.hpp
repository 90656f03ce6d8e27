#pragma once

#include <stdexcept>
#include <string>

namespace mrseg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mask file does not start with the expected magic/header.
struct FormatError : Error {
    using Error::Error;
};

// Payload shorter than the header promises.
struct TruncatedError : Error {
    using Error::Error;
};

// Payload element outside its domain ({0,1} for masks, [0,1] for probabilities).
struct ValueError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Two grids that must agree on dims/spacing do not.
struct ShapeError : Error {
    using Error::Error;
};

struct ArgumentError : Error {
    using Error::Error;
};

}  // namespace mrseg
