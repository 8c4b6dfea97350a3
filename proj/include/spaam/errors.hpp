#pragma once

#include <stdexcept>
#include <string>

namespace spaam {

// Exit-code classes used by the CLI: 1 usage, 2 input, 3 capacity/timeout,
// 4 internal.
enum class ErrorClass : int {
    Usage = 1,
    Input = 2,
    Capacity = 3,
    Internal = 4,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const { return cls_; }

private:
    ErrorClass cls_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorClass::Input, what) {}
};

// Hypothesis-cap overflows, solver timeouts: the run must be reconfigured,
// never silently truncated.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error(ErrorClass::Capacity, what) {}
};

class TimeoutError : public Error {
public:
    explicit TimeoutError(const std::string& what) : Error(ErrorClass::Capacity, what) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(ErrorClass::Internal, what) {}
};

}  // namespace spaam
