#pragma once

#include <stdexcept>
#include <string>

namespace bnshap {

enum class ErrorKind {
    Input,      // malformed model, unknown variable, bad argument
    Capacity,   // enumeration or state-space cap exceeded
    Numerical,  // ill-conditioned linear algebra
    Domain,     // e.g. conditioning on a zero-probability event
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throwInput(const std::string& msg) { throw Error(ErrorKind::Input, msg); }
[[noreturn]] inline void throwCapacity(const std::string& msg) { throw Error(ErrorKind::Capacity, msg); }

}  // namespace bnshap
