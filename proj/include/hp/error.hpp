#pragma once

#include <stdexcept>
#include <string>

namespace hp {

enum class ErrorCode {
    InvalidArgument = 1,
    Parse = 2,
    Ellipticity = 3,
    Lopatinskii = 4,
    Conditioning = 5,
    Numerical = 6,
    Io = 7,
};

/// Base exception for every failure raised by the library. The code is what
/// crosses the C boundary; the message carries the detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::InvalidArgument, what);
}

} // namespace hp
