#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kinalign {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class BehindCamera : public Error {
public:
    using Error::Error;
};

class DegenerateFace : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class EmptyMesh : public Error {
public:
    using Error::Error;
};

class AllBehindCamera : public Error {
public:
    using Error::Error;
};

class UnknownExtractor : public Error {
public:
    using Error::Error;
};

class UnknownDomain : public Error {
public:
    using Error::Error;
};

class EmptyList : public Error {
public:
    using Error::Error;
};

/// Raised when the optimization loss turns non-finite; carries the loss
/// trace recorded up to the failing iteration.
class NonFiniteLoss : public Error {
public:
    NonFiniteLoss(const std::string& msg, std::vector<double> trace)
        : Error(msg), loss_trace(std::move(trace)) {}

    std::vector<double> loss_trace;
};

}  // namespace kinalign
