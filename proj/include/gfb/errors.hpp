#pragma once

#include <stdexcept>
#include <string>

namespace gfb {

// exit codes used by the command line tool
enum class ErrorKind {
    ConfigInvalid = 2,
    InvalidBounds = 2,
    MeshMismatch = 2,
    EmptyComplex = 2,
    MemoryCap = 3,
    NoConvergence = 4,
    NonMonotone = 4,
    InternalError = 4,
    IoError = 1,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), kind_(kind), name_(std::move(name)), message_(what) {}

    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }
    const std::string& name() const { return name_; }
    const std::string& message() const { return message_; }

private:
    ErrorKind kind_;
    std::string name_;
    std::string message_;
};

#define GFB_ERROR_TYPE(T)                                                          \
    struct T : Error {                                                             \
        explicit T(const std::string& what) : Error(ErrorKind::T, #T, what) {}     \
    };

GFB_ERROR_TYPE(ConfigInvalid)
GFB_ERROR_TYPE(InvalidBounds)
GFB_ERROR_TYPE(MeshMismatch)
GFB_ERROR_TYPE(EmptyComplex)
GFB_ERROR_TYPE(MemoryCap)
GFB_ERROR_TYPE(NoConvergence)
GFB_ERROR_TYPE(NonMonotone)
GFB_ERROR_TYPE(InternalError)
GFB_ERROR_TYPE(IoError)

#undef GFB_ERROR_TYPE

// prefix the message with the pipeline stage, keep the type
[[noreturn]] inline void rethrow_in_stage(const Error& e, const std::string& stage) {
    const std::string msg = stage + ": " + e.message();
#define GFB_RETHROW(T) \
    if (e.name() == #T) throw T(msg);
    GFB_RETHROW(ConfigInvalid)
    GFB_RETHROW(InvalidBounds)
    GFB_RETHROW(MeshMismatch)
    GFB_RETHROW(EmptyComplex)
    GFB_RETHROW(MemoryCap)
    GFB_RETHROW(NoConvergence)
    GFB_RETHROW(NonMonotone)
    GFB_RETHROW(InternalError)
    GFB_RETHROW(IoError)
#undef GFB_RETHROW
    throw Error(e.kind(), e.name(), msg);
}

} // namespace gfb
