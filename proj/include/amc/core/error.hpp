// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace amc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation contract (shape mismatch, bad argument,
/// malformed input). The message names the offending field or dimension.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(what) {}
};

/// A computation produced a non-finite value or failed numerically.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what) {}
};

/// A file could not be read or written, or its contents are malformed.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

namespace detail {

inline void format_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void format_into(std::ostringstream& os, const T& head, const Rest&... rest) {
    os << head;
    format_into(os, rest...);
}

}  // namespace detail

/// Builds an error message from stream-insertable pieces.
template <typename... Parts>
std::string message(const Parts&... parts) {
    std::ostringstream os;
    detail::format_into(os, parts...);
    return os.str();
}

template <typename... Parts>
void require(bool condition, const Parts&... parts) {
    if (!condition) throw ContractError(message(parts...));
}

}  // namespace amc
