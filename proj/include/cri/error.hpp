#pragma once

#include <stdexcept>
#include <string>

namespace cri {

enum class ErrorKind {
    InvalidIndex,
    InvalidInput,
    Domain,
    BudgetExceeded,
    Format,
    Io,
    Usage,
};

// Base of every error thrown by the library. The kind drives the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define CRI_DEFINE_ERROR(Name)                                                      \
    class Name : public Error {                                                     \
    public:                                                                         \
        explicit Name(const std::string& what) : Error(ErrorKind::Name, what) {}    \
    }

CRI_DEFINE_ERROR(InvalidIndex);
CRI_DEFINE_ERROR(InvalidInput);
CRI_DEFINE_ERROR(BudgetExceeded);
CRI_DEFINE_ERROR(Format);
CRI_DEFINE_ERROR(Io);
CRI_DEFINE_ERROR(Usage);

#undef CRI_DEFINE_ERROR

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

using FormatError = Format;
using IoError = Io;
using UsageError = Usage;

}  // namespace cri
