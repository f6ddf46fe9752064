#pragma once

#include <stdexcept>
#include <string>

namespace hilasso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent matrix/vector dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A value violates a documented domain invariant (negative lambda, bad partition, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A serialized artifact does not match its schema. `path()` is the JSON
/// location of the offending field, e.g. "groups[1]" or "atoms[3][0]".
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace hilasso
