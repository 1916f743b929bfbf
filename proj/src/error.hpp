#pragma once

#include <stdexcept>
#include <string>

namespace meco {

// Error classes mirror the status codes exposed through the C API.
enum class ErrorCode {
    invalid_argument = 1,
    io = 2,
    parse = 3,
    version_mismatch = 4,
    empty_input = 5,
    internal = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace meco
