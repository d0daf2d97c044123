#pragma once

#include <stdexcept>
#include <string>

namespace choq {

// Exit-code categories used by the CLI: validation errors map to 2,
// solver nonconvergence to 3, I/O failures to 4.
enum class ErrorKind { Validation = 2, Solver = 3, Io = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct OutOfRange : Error {
    explicit OutOfRange(const std::string& name)
        : Error(ErrorKind::Validation, "parameter out of range: " + name) {}
};

struct DimensionTooSmall : Error {
    explicit DimensionTooSmall(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct AlphaOutOfRange : Error {
    explicit AlphaOutOfRange(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct SingularResolvent : Error {
    SingularResolvent()
        : Error(ErrorKind::Validation,
                "resolvent with omega=0 requires a mean-free field") {}
};

struct ZeroField : Error {
    ZeroField() : Error(ErrorKind::Validation, "operation undefined on the zero field") {}
};

struct PNotC2 : Error {
    PNotC2() : Error(ErrorKind::Validation, "second variation requires p >= 2") {}
};

struct IncompatibleSpec : Error {
    explicit IncompatibleSpec(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct RegimeUnsupported : Error {
    explicit RegimeUnsupported(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct RegimeMismatch : Error {
    explicit RegimeMismatch(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct NotConverged : Error {
    explicit NotConverged(const std::string& msg)
        : Error(ErrorKind::Solver, msg) {}
};

struct Diverged : Error {
    explicit Diverged(const std::string& msg)
        : Error(ErrorKind::Solver, msg) {}
};

struct EigensolverStall : Error {
    explicit EigensolverStall(const std::string& msg)
        : Error(ErrorKind::Solver, msg) {}
};

struct WindowTooNoisy : Error {
    explicit WindowTooNoisy(const std::string& msg)
        : Error(ErrorKind::Validation, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

} // namespace choq
