#pragma once

#include <stdexcept>
#include <string>

namespace zsl {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes do not conform (matmul, broadcast, adam state vs param).
struct ShapeError : Error {
    using Error::Error;
};

// A label or split index is out of range.
struct IndexError : Error {
    using Error::Error;
};

// A computation produced or encountered a non-finite value.
struct NumericError : Error {
    using Error::Error;
};

// Invalid hyperparameters, empty label space, or an ill-formed request.
struct ConfigError : Error {
    using Error::Error;
};

// File I/O failures and dataset/checkpoint validation failures.
struct DataError : Error {
    using Error::Error;
};

// A file is missing, unreadable, or truncated.
struct FileError : DataError {
    using DataError::DataError;
};

// A file opened fine but its contents are not the expected format
// (magic, version, or parse failures).
struct FormatError : DataError {
    using DataError::DataError;
};

} // namespace zsl
