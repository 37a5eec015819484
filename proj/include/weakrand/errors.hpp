#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace weakrand {

inline std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Malformed or out-of-contract input.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A scalar argument outside its mathematical domain (e.g. a probability > 1).
class DomainError : public ValidationError {
public:
    DomainError(const std::string& what, double value)
        : ValidationError(what + " (got " + format_number(value) + ")"), value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

// No point satisfying the constraints could be produced. `residual` is the
// smallest constraint violation seen.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws DomainError unless lo <= value <= hi.
inline void require_in_range(double value, double lo, double hi, const std::string& name) {
    if (!(value >= lo && value <= hi)) {
        throw DomainError(name + " must lie in [" + format_number(lo) + ", " + format_number(hi) + "]",
                          value);
    }
}

inline void require_probability(double value, const std::string& name) {
    require_in_range(value, 0.0, 1.0, name);
}

}  // namespace weakrand
