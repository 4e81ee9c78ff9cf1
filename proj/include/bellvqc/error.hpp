#pragma once

#include <stdexcept>
#include <string>

namespace bellvqc {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
    invalid_argument,
    capacity,
    config,
    convergence,
    numerical,
    model_invalid,
    signals_inconsistent,
    unsupported,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string &w)
        : Error(ErrorKind::invalid_argument, w) {}
};

/// Problem size exceeds what the exact algorithms can hold in memory / time.
struct CapacityError : Error {
    explicit CapacityError(const std::string &w) : Error(ErrorKind::capacity, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string &w) : Error(ErrorKind::config, w) {}
};

struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string &w)
        : Error(ErrorKind::convergence, w) {}
};

/// NaN / inf encountered in an energy or gradient; aborts training.
struct NumericalError : Error {
    explicit NumericalError(const std::string &w) : Error(ErrorKind::numerical, w) {}
};

struct ModelInvalid : Error {
    explicit ModelInvalid(const std::string &w) : Error(ErrorKind::model_invalid, w) {}
};

struct SignalsInconsistent : Error {
    explicit SignalsInconsistent(const std::string &w)
        : Error(ErrorKind::signals_inconsistent, w) {}
};

struct UnsupportedGate : Error {
    explicit UnsupportedGate(const std::string &w) : Error(ErrorKind::unsupported, w) {}
};

} // namespace bellvqc
