// Copyright 2026 The cpmdet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpm {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
    Parameter = 1,
    Alphabet,
    Range,
    Mismatch,
    TooLong,
    Io,
    Config,
    EmptyInput,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what)
{
    if (!ok)
        fail(code, what);
}

}  // namespace cpm
