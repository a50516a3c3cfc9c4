#pragma once
#include <stdexcept>
#include <string>

namespace lamlab {

// Failure categories; the CLI maps them onto exit codes.
enum class ErrorKind { Precondition, Parse, Validation, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
    ErrorKind kind() const { return kind_; }
private:
    ErrorKind kind_;
};

inline Error precondition(const std::string& s) { return Error(ErrorKind::Precondition, s); }
inline Error parse_error(const std::string& s) { return Error(ErrorKind::Parse, s); }
inline Error validation(const std::string& s) { return Error(ErrorKind::Validation, s); }
inline Error numerical(const std::string& s) { return Error(ErrorKind::Numerical, s); }

}
