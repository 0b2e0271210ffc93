#pragma once

#include <stdexcept>
#include <string>

namespace chromaterm {

/// Failure category; the CLI maps each kind onto its exit code.
enum class ErrorKind {
    usage,      ///< bad arguments or preconditions on the caller's side
    data,       ///< unreadable, malformed or inconsistent input data
    numerical,  ///< a computation produced a non-finite or unusable result
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return Error(ErrorKind::usage, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::numerical, what); }

}  // namespace chromaterm
