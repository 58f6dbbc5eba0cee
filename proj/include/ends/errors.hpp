#pragma once

#include <stdexcept>
#include <string>

namespace ends {

enum class ErrorKind {
    domain,        // argument outside the mathematical domain
    convergence,   // numerical procedure failed to stabilize
    validation,    // malformed input or configuration
    precondition,  // caller violated an operation precondition
    internal       // should not happen
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const char* what)
{
    if (!cond) fail(kind, what);
}

}  // namespace ends
